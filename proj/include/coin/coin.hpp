#pragma once

// Umbrella header.

#include "coin/binio.hpp"
#include "coin/data/cache.hpp"
#include "coin/data/csv.hpp"
#include "coin/data/dataset.hpp"
#include "coin/data/linqs.hpp"
#include "coin/error.hpp"
#include "coin/graph/io.hpp"
#include "coin/graph/knn.hpp"
#include "coin/graph/ops.hpp"
#include "coin/graph/sparse_graph.hpp"
#include "coin/model/coin_model.hpp"
#include "coin/model/config.hpp"
#include "coin/model/diffusion.hpp"
#include "coin/model/feature_transforms.hpp"
#include "coin/model/protocol.hpp"
#include "coin/model/splits.hpp"
#include "coin/model/train.hpp"
#include "coin/nn/checkpoint.hpp"
#include "coin/nn/layers.hpp"
#include "coin/nn/loss.hpp"
#include "coin/nn/optim.hpp"
#include "coin/nn/tensor.hpp"
#include "coin/pde/axioms.hpp"
#include "coin/pde/field.hpp"
#include "coin/pde/schemes.hpp"
#include "coin/pde/stochastic.hpp"
#include "coin/pde/suite.hpp"
#include "coin/rng.hpp"
#include "coin/text.hpp"

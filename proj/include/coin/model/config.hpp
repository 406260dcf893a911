#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "coin/graph/sparse_graph.hpp"
#include "coin/nn/optim.hpp"

namespace coin::model {

/// Hyper-parameters of one COIN training run.
struct CoinConfig {
  std::size_t hidden_dim = 64;
  std::size_t K = 20;        // number of diffusion layers
  double sigma2 = 0.4;       // diffusion strength per layer
  double lr = 0.01;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  double dropout_rate = 0.0;  // applied after each diffusion layer
  nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
  std::uint64_t seed = 0;
  bool residual = true;  // false gives the plain two-layer MLP ablation

  void validate() const {
    if (hidden_dim == 0) throw InputError("hidden_dim must be >= 1");
    if (!(sigma2 >= 0.0)) throw InputError("sigma2 must be >= 0");
    if (patience < 1) throw InputError("patience must be >= 1");
    if (max_epochs < 1) throw InputError("max_epochs must be >= 1");
    if (!(lr >= 0.0)) throw InputError("lr must be >= 0");
    if (!(weight_decay >= 0.0)) throw InputError("weight_decay must be >= 0");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InputError("dropout_rate must lie in [0, 1)");
  }

  friend bool operator==(const CoinConfig&, const CoinConfig&) = default;
};

/// True when sigma2 * max_i sum_{j != i} w_ij <= 1, the condition under which
/// every diffusion layer is a convex combination (discrete maximum principle).
inline bool diffusion_is_monotone(const graph::SparseGraph& g, double sigma2) {
  return sigma2 * g.max_laplacian_degree() <= 1.0;
}

}  // namespace coin::model

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "coin/graph/sparse_graph.hpp"
#include "coin/nn/tensor.hpp"

namespace coin::data {

inline constexpr int kUnlabeled = -1;

/// How a bundle was produced. Stored in the cache so cached and fresh loads compare equal.
struct Provenance {
  std::vector<std::string> sources;
  std::string format;      // "linqs", "pubmed", "csv"
  std::string graph_kind;  // "gcn", "knn", "none"
  bool row_normalized = false;
  std::size_t raw_nodes = 0;
  std::size_t dangling_edges = 0;
  std::size_t self_loops = 0;
  std::size_t zero_feature_rows = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Features, labels and the normalized graph over the same n nodes.
struct DatasetBundle {
  nn::Tensor features;
  std::vector<int> labels;  // kUnlabeled for nodes without a class
  graph::SparseGraph graph;
  std::vector<std::string> class_names;
  Provenance provenance;

  std::size_t n_nodes() const noexcept { return labels.size(); }
  std::size_t n_classes() const noexcept { return class_names.size(); }
  std::size_t feature_dim() const noexcept { return features.cols(); }
  std::size_t n_edges() const noexcept { return graph.undirected_edge_count(); }

  /// Throws if the parts disagree on n or a label is out of range.
  void validate() const {
    if (features.rows() != labels.size() || graph.n_nodes() != labels.size()) {
      throw ShapeError("dataset: features " + features.shape() + ", " + std::to_string(labels.size()) +
                       " labels and a " + std::to_string(graph.n_nodes()) + "-node graph disagree");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != kUnlabeled && (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes())) {
        throw InputError("dataset: label " + std::to_string(labels[i]) + " of node " + std::to_string(i) +
                         " outside the " + std::to_string(n_classes()) + " classes");
      }
    }
  }

  std::string stats_line() const {
    return "nodes=" + std::to_string(n_nodes()) + " edges=" + std::to_string(n_edges()) +
           " classes=" + std::to_string(n_classes()) + " dim=" + std::to_string(feature_dim());
  }

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

/// Divides every row by its sum; all-zero rows stay zero and are counted.
inline nn::Tensor row_normalize(const nn::Tensor& x, std::size_t* zero_rows = nullptr) {
  nn::Tensor out = x;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    double total = 0.0;
    for (double v : r) total += v;
    if (total == 0.0) {
      ++zeros;
      continue;
    }
    for (double& v : r) v /= total;
  }
  if (zero_rows != nullptr) *zero_rows = zeros;
  return out;
}

/// Node ids carrying a label.
inline std::vector<std::size_t> labeled_nodes(const std::vector<int>& labels) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kUnlabeled) out.push_back(i);
  }
  return out;
}

}  // namespace coin::data

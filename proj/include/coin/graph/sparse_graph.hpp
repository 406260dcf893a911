#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "coin/error.hpp"

namespace coin::graph {

using NodeId = std::size_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// Weighted adjacency in compressed-row form.
///
/// Column indices are strictly increasing within each row, weights are
/// non-negative, and degree(i) is the sum of the stored weights of row i
/// (a stored diagonal entry counts towards it).
class SparseGraph {
 public:
  SparseGraph() : row_offsets_{0} {}

  /// Takes ownership of validated CSR arrays.
  SparseGraph(std::size_t n_nodes, std::vector<std::size_t> row_offsets,
              std::vector<NodeId> col_indices, std::vector<double> weights)
      : n_nodes_(n_nodes),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        weights_(std::move(weights)) {
    validate();
    degree_.assign(n_nodes_, 0.0);
    for (std::size_t i = 0; i < n_nodes_; ++i) {
      double d = 0.0;
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) d += weights_[k];
      degree_[i] = d;
    }
  }

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t nnz() const noexcept { return weights_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const NodeId> col_indices() const noexcept { return col_indices_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> degree() const noexcept { return degree_; }

  std::span<const NodeId> neighbors(NodeId i) const noexcept {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> neighbor_weights(NodeId i) const noexcept {
    return {weights_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  /// Stored weight of (i, j), or 0 when absent.
  double weight(NodeId i, NodeId j) const noexcept {
    const auto cols = neighbors(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return weights_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  /// Row sum excluding the diagonal; the diagonal drops out of L = D - W.
  double laplacian_degree(NodeId i) const noexcept { return degree_[i] - weight(i, i); }

  double max_laplacian_degree() const noexcept {
    double m = 0.0;
    for (NodeId i = 0; i < n_nodes_; ++i) m = std::max(m, laplacian_degree(i));
    return m;
  }

  /// Exact structural and numerical symmetry.
  bool is_symmetric() const noexcept {
    for (NodeId i = 0; i < n_nodes_; ++i) {
      const auto cols = neighbors(i);
      const auto ws = neighbor_weights(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (weight(cols[k], i) != ws[k]) return false;
      }
    }
    return true;
  }

  /// Number of unordered pairs {i, j}, i != j, with a stored entry in either direction
  /// counted once via i < j (meaningful for symmetric graphs).
  std::size_t undirected_edge_count() const noexcept {
    std::size_t count = 0;
    for (NodeId i = 0; i < n_nodes_; ++i) {
      for (NodeId j : neighbors(i)) count += j > i ? 1 : 0;
    }
    return count;
  }

  friend bool operator==(const SparseGraph& a, const SparseGraph& b) {
    return std::tie(a.n_nodes_, a.row_offsets_, a.col_indices_, a.weights_) ==
           std::tie(b.n_nodes_, b.row_offsets_, b.col_indices_, b.weights_);
  }

 private:
  void validate() const {
    if (row_offsets_.size() != n_nodes_ + 1 || row_offsets_.front() != 0 ||
        row_offsets_.back() != col_indices_.size() || col_indices_.size() != weights_.size()) {
      throw InputError("SparseGraph: inconsistent CSR array lengths");
    }
    for (std::size_t i = 0; i < n_nodes_; ++i) {
      if (row_offsets_[i] > row_offsets_[i + 1]) {
        throw InputError("SparseGraph: row offsets decrease at row " + std::to_string(i));
      }
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        if (col_indices_[k] >= n_nodes_) {
          throw InputError("SparseGraph: column " + std::to_string(col_indices_[k]) +
                           " out of range in row " + std::to_string(i));
        }
        if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
          throw InputError("SparseGraph: columns not strictly increasing in row " + std::to_string(i));
        }
        if (!(weights_[k] >= 0.0)) {
          throw InputError("SparseGraph: negative or NaN weight in row " + std::to_string(i));
        }
      }
    }
  }

  std::size_t n_nodes_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<NodeId> col_indices_;
  std::vector<double> weights_;
  std::vector<double> degree_;
};

namespace detail {

enum class Combine { sum, max };

/// Sorts entries by (src, dst) and merges duplicates.
inline SparseGraph build_csr(EdgeList entries, std::size_t n_nodes, Combine combine) {
  std::sort(entries.begin(), entries.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  std::vector<std::size_t> offsets(n_nodes + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> weights;
  cols.reserve(entries.size());
  weights.reserve(entries.size());
  std::size_t k = 0;
  while (k < entries.size()) {
    const Edge& e = entries[k];
    double w = e.weight;
    std::size_t next = k + 1;
    while (next < entries.size() && entries[next].src == e.src && entries[next].dst == e.dst) {
      w = combine == Combine::sum ? w + entries[next].weight : std::max(w, entries[next].weight);
      ++next;
    }
    cols.push_back(e.dst);
    weights.push_back(w);
    ++offsets[e.src + 1];
    k = next;
  }
  for (std::size_t i = 0; i < n_nodes; ++i) offsets[i + 1] += offsets[i];
  return SparseGraph(n_nodes, std::move(offsets), std::move(cols), std::move(weights));
}

}  // namespace detail

/// Builds a graph from directed entries; duplicate (i, j) entries are summed.
inline SparseGraph from_edge_list(const EdgeList& edges, std::size_t n_nodes) {
  for (const Edge& e : edges) {
    if (e.src >= n_nodes || e.dst >= n_nodes) {
      throw InputError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                       ") references a node outside [0, " + std::to_string(n_nodes) + ")");
    }
    if (!(e.weight >= 0.0)) {
      throw InputError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                       ") has negative or NaN weight");
    }
  }
  return detail::build_csr(edges, n_nodes, detail::Combine::sum);
}

/// Lists the stored entries in row order.
inline EdgeList to_edge_list(const SparseGraph& g) {
  EdgeList out;
  out.reserve(g.nnz());
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    const auto cols = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out.push_back({i, cols[k], ws[k]});
  }
  return out;
}

}  // namespace coin::graph

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "coin/graph/sparse_graph.hpp"
#include "coin/nn/tensor.hpp"

namespace coin::graph {

/// Undirected version of g with w'_ij = max(w_ij, w_ji).
inline SparseGraph symmetrize(const SparseGraph& g) {
  EdgeList entries;
  entries.reserve(2 * g.nnz());
  for (const Edge& e : to_edge_list(g)) {
    entries.push_back(e);
    entries.push_back({e.dst, e.src, e.weight});
  }
  return detail::build_csr(std::move(entries), g.n_nodes(), detail::Combine::max);
}

/// Drops stored diagonal entries.
inline SparseGraph remove_self_loops(const SparseGraph& g) {
  EdgeList entries;
  for (const Edge& e : to_edge_list(g)) {
    if (e.src != e.dst) entries.push_back(e);
  }
  return detail::build_csr(std::move(entries), g.n_nodes(), detail::Combine::sum);
}

inline constexpr std::size_t kNotKept = std::numeric_limits<std::size_t>::max();

struct Subgraph {
  SparseGraph graph;
  std::vector<std::size_t> old_to_new;  // kNotKept for dropped nodes
  std::vector<NodeId> new_to_old;       // increasing
};

/// Induced subgraph on `keep`, which must be sorted and duplicate-free; relative order is preserved.
inline Subgraph induced_subgraph(const SparseGraph& g, const std::vector<NodeId>& keep) {
  Subgraph out;
  out.old_to_new.assign(g.n_nodes(), kNotKept);
  out.new_to_old = keep;
  for (std::size_t k = 0; k < keep.size(); ++k) out.old_to_new[keep[k]] = k;
  EdgeList entries;
  for (NodeId old_i : keep) {
    const auto cols = g.neighbors(old_i);
    const auto ws = g.neighbor_weights(old_i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t new_j = out.old_to_new[cols[k]];
      if (new_j != kNotKept) entries.push_back({out.old_to_new[old_i], new_j, ws[k]});
    }
  }
  out.graph = detail::build_csr(std::move(entries), keep.size(), detail::Combine::sum);
  return out;
}

/// Connected component labels (by discovery order from node 0 upwards) of a symmetric graph.
inline std::vector<std::size_t> component_labels(const SparseGraph& g, std::size_t& n_components) {
  std::vector<std::size_t> label(g.n_nodes(), kNotKept);
  std::vector<NodeId> stack;
  n_components = 0;
  for (NodeId start = 0; start < g.n_nodes(); ++start) {
    if (label[start] != kNotKept) continue;
    label[start] = n_components;
    stack.push_back(start);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (label[v] == kNotKept) {
          label[v] = n_components;
          stack.push_back(v);
        }
      }
    }
    ++n_components;
  }
  return label;
}

/// Largest connected component of a symmetric graph. Ties go to the component
/// containing the smallest node id.
inline Subgraph largest_connected_component(const SparseGraph& g) {
  if (g.n_nodes() == 0) return Subgraph{};
  std::size_t n_components = 0;
  const auto label = component_labels(g, n_components);
  std::vector<std::size_t> size(n_components, 0);
  for (std::size_t l : label) ++size[l];
  // Components are numbered in order of their smallest member, so the first maximum wins ties.
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_components; ++c) {
    if (size[c] > size[best]) best = c;
  }
  std::vector<NodeId> keep;
  keep.reserve(size[best]);
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    if (label[i] == best) keep.push_back(i);
  }
  return induced_subgraph(g, keep);
}

/// D^{-1/2} W D^{-1/2} using the stored row sums; isolated nodes stay isolated.
inline SparseGraph symmetric_normalize(const SparseGraph& g) {
  std::vector<double> inv_sqrt(g.n_nodes(), 0.0);
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    const double d = g.degree()[i];
    inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  std::vector<std::size_t> offsets(g.row_offsets().begin(), g.row_offsets().end());
  std::vector<NodeId> cols(g.col_indices().begin(), g.col_indices().end());
  std::vector<double> weights(g.nnz());
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      weights[k] = g.weights()[k] * (inv_sqrt[i] * inv_sqrt[cols[k]]);
    }
  }
  return SparseGraph(g.n_nodes(), std::move(offsets), std::move(cols), std::move(weights));
}

/// GCN normalization: D~^{-1/2} (W + I) D~^{-1/2} with D~ = rowsum(W + I).
inline SparseGraph gcn_normalize(const SparseGraph& g) {
  EdgeList entries = to_edge_list(g);
  for (NodeId i = 0; i < g.n_nodes(); ++i) entries.push_back({i, i, 1.0});
  return symmetric_normalize(detail::build_csr(std::move(entries), g.n_nodes(), detail::Combine::sum));
}

/// (L U)_i = sum_j w_ij (u_i - u_j) with L = D - W, in one pass over the stored entries.
inline nn::Tensor laplacian_apply(const SparseGraph& g, const nn::Tensor& u) {
  if (u.rows() != g.n_nodes()) {
    throw ShapeError("laplacian_apply: graph has " + std::to_string(g.n_nodes()) +
                     " nodes but input is " + u.shape());
  }
  const std::size_t c = u.cols();
  nn::Tensor out(u.rows(), c);
  const auto offsets = g.row_offsets();
  const auto cols = g.col_indices();
  const auto ws = g.weights();
  for (NodeId i = 0; i < g.n_nodes(); ++i) {
    auto o = out.row(i);
    const auto ui = u.row(i);
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const double w = ws[k];
      const auto uj = u.row(cols[k]);
      for (std::size_t ch = 0; ch < c; ++ch) o[ch] += w * (ui[ch] - uj[ch]);
    }
  }
  return out;
}

}  // namespace coin::graph

#pragma once

// Gaussian-kernel k-nearest-neighbour graphs over feature rows.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "coin/graph/ops.hpp"
#include "coin/nn/tensor.hpp"

namespace coin::graph {

/// Lower bound on a per-point bandwidth; duplicate points otherwise give sigma = 0.
inline constexpr double kMinBandwidth = 1e-12;

struct KnnKernel {
  EdgeList edges;                      // directed i -> neighbour, raw kernel weights
  std::vector<double> bandwidth;       // sigma(x_i)
  std::size_t degenerate_bandwidths = 0;
};

struct KnnGraph {
  SparseGraph graph;  // symmetrized and D^{-1/2} W D^{-1/2} normalized
  std::size_t degenerate_bandwidths = 0;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

/// For each point keeps its `n_top` nearest other points with weight
/// exp(-|x_i - x_j|^2 / sigma_i^2), where sigma_i is the distance to the
/// `sigma_k`-th closest other point. Neighbour ties resolve by smaller index.
inline KnnKernel knn_gaussian_kernel(const nn::Tensor& x, std::size_t n_top, std::size_t sigma_k) {
  const std::size_t n = x.rows();
  if (n_top < 1 || sigma_k < 1) throw InputError("knn graph: n_top and sigma_k must be >= 1");
  if (n <= std::max(n_top, sigma_k)) {
    throw InputError("knn graph: need more than max(n_top, sigma_k) = " +
                     std::to_string(std::max(n_top, sigma_k)) + " points, got " + std::to_string(n));
  }
  KnnKernel out;
  out.bandwidth.resize(n);
  std::vector<std::pair<double, NodeId>> dist;
  dist.reserve(n - 1);
  const std::size_t needed = std::max(n_top, sigma_k);
  for (NodeId i = 0; i < n; ++i) {
    dist.clear();
    for (NodeId j = 0; j < n; ++j) {
      if (j != i) dist.emplace_back(squared_distance(x.row(i), x.row(j)), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(needed), dist.end());
    double sigma = std::sqrt(dist[sigma_k - 1].first);
    if (sigma < kMinBandwidth) {
      sigma = kMinBandwidth;
      ++out.degenerate_bandwidths;
    }
    out.bandwidth[i] = sigma;
    const double inv_sigma2 = 1.0 / (sigma * sigma);
    for (std::size_t k = 0; k < n_top; ++k) {
      out.edges.push_back({i, dist[k].second, std::exp(-dist[k].first * inv_sigma2)});
    }
  }
  return out;
}

/// Kernel graph ready for diffusion: max-symmetrized, then D^{-1/2} W D^{-1/2}
/// without added self-loops.
inline KnnGraph build_knn_gaussian(const nn::Tensor& x, std::size_t n_top, std::size_t sigma_k) {
  auto kernel = knn_gaussian_kernel(x, n_top, sigma_k);
  const auto directed = from_edge_list(kernel.edges, x.rows());
  return KnnGraph{symmetric_normalize(symmetrize(directed)), kernel.degenerate_bandwidths};
}

}  // namespace coin::graph

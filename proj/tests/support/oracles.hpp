#pragma once

// Independent dense reference implementations used as test oracles.

#include <cmath>
#include <functional>
#include <vector>

#include "coin/graph/sparse_graph.hpp"
#include "coin/nn/tensor.hpp"
#include "coin/rng.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense dense(const coin::graph::SparseGraph& g) {
  Dense a(g.n_nodes(), std::vector<double>(g.n_nodes(), 0.0));
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const auto cols = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) a[i][cols[k]] = ws[k];
  }
  return a;
}

inline Dense gcn(Dense w) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) w[i][i] += 1.0;
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : w[i]) d[i] += v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i][j] /= std::sqrt(d[i] * d[j]);
  }
  return w;
}

/// (I - s L) applied K times with L = diag(rowsum off-diagonal) - offdiag(W).
inline coin::nn::Tensor diffuse(const Dense& w, const coin::nn::Tensor& u0, std::size_t K, double s) {
  const std::size_t n = w.size();
  coin::nn::Tensor u = u0;
  for (std::size_t step = 0; step < K; ++step) {
    coin::nn::Tensor next = u;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < u.cols(); ++c) {
        double lu = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) lu += w[i][j] * (u(i, c) - u(j, c));
        }
        next(i, c) = u(i, c) - s * lu;
      }
    }
    u = next;
  }
  return u;
}

/// Symmetric graph with independent edges of probability `p` and weights in (0.1, 1].
inline coin::graph::SparseGraph random_symmetric(std::size_t n, double p, coin::Rng& rng) {
  coin::graph::EdgeList edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) {
        const double w = rng.uniform(0.1, 1.0);
        edges.push_back({i, j, w});
        edges.push_back({j, i, w});
      }
    }
  }
  return coin::graph::from_edge_list(edges, n);
}

inline coin::nn::Tensor random_tensor(std::size_t r, std::size_t c, coin::Rng& rng, double lo = -1.0,
                                      double hi = 1.0) {
  coin::nn::Tensor t(r, c);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

/// Rows on the probability simplex.
inline coin::nn::Tensor random_simplex_rows(std::size_t r, std::size_t c, coin::Rng& rng) {
  coin::nn::Tensor t = random_tensor(r, c, rng, 0.01, 1.0);
  for (std::size_t i = 0; i < r; ++i) {
    double s = 0.0;
    for (double v : t.row(i)) s += v;
    for (double& v : t.row(i)) v /= s;
  }
  return t;
}

/// Central difference of `loss` with respect to every entry of `x`.
inline coin::nn::Tensor finite_difference(coin::nn::Tensor& x, const std::function<double()>& loss,
                                          double h = 1e-6) {
  coin::nn::Tensor g(x.rows(), x.cols());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = x.values()[k];
    x.values()[k] = saved + h;
    const double up = loss();
    x.values()[k] = saved - h;
    const double down = loss();
    x.values()[k] = saved;
    g.values()[k] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max |a - b| / max(1e-8, max |b|): gradient comparison scaled by the oracle's magnitude.
inline double relative_error(const coin::nn::Tensor& a, const coin::nn::Tensor& b) {
  double diff = 0.0;
  double scale = 1e-8;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, std::abs(a.values()[k] - b.values()[k]));
    scale = std::max(scale, std::abs(b.values()[k]));
  }
  return diff / scale;
}

}  // namespace oracle

#pragma once

// Diffusion-layer invariants over random symmetric graphs.

#include <algorithm>
#include <cmath>

#include "coin/graph/ops.hpp"
#include "coin/model/config.hpp"
#include "coin/model/diffusion.hpp"
#include "support/oracles.hpp"

namespace invariants {

struct Worst {
  // Residuals are scaled by max(1, magnitude of the terms summed); non-monotone
  // draws may amplify entries and round-off grows with them.
  double row_sum = 0.0;     // |sum_c u^K_ic - 1|
  double column_mass = 0.0; // |sum_i u^K_ic - sum_i u0_ic|
  double max_principle = 0.0;  // excursion outside [min u0, max u0], monotone cases only
  double adjoint = 0.0;     // |<D a, b> - <a, D b>| / (1 + |<D a, b>|)
  std::size_t monotone_cases = 0;
  std::size_t graphs = 0;
};

inline Worst check(std::size_t n_graphs, std::uint64_t seed) {
  coin::Rng rng(seed);
  Worst w;
  for (std::size_t trial = 0; trial < n_graphs; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    auto g = oracle::random_symmetric(n, rng.uniform(0.02, 0.5), rng);
    if (rng.bernoulli(0.5)) g = coin::graph::gcn_normalize(g);
    const std::size_t c = 1 + rng.below(5);
    const std::size_t K = rng.below(31);
    // Half the draws respect sigma2 * deg <= 1.
    const double max_deg = std::max(g.max_laplacian_degree(), 1e-9);
    const double sigma2 = rng.bernoulli(0.5) ? rng.uniform(0.0, 1.0) / max_deg : rng.uniform(0.0, 1.0);

    const auto u0 = oracle::random_simplex_rows(n, c, rng);
    const auto uK = coin::model::diffusion_forward(u0, g, K, sigma2);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      double scale = 1.0;
      for (double v : uK.row(i)) {
        s += v;
        scale = std::max(scale, std::abs(v));
      }
      w.row_sum = std::max(w.row_sum, std::abs(s - 1.0) / scale);
    }
    for (std::size_t col = 0; col < c; ++col) {
      double before = 0.0;
      double after = 0.0;
      double lo = u0(0, col);
      double hi = u0(0, col);
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        before += u0(i, col);
        after += uK(i, col);
        scale = std::max(scale, std::abs(uK(i, col)));
        lo = std::min(lo, u0(i, col));
        hi = std::max(hi, u0(i, col));
      }
      w.column_mass = std::max(w.column_mass, std::abs(after - before) / scale);
      if (coin::model::diffusion_is_monotone(g, sigma2)) {
        for (std::size_t i = 0; i < n; ++i) {
          w.max_principle = std::max({w.max_principle, lo - uK(i, col), uK(i, col) - hi});
        }
      }
    }
    if (coin::model::diffusion_is_monotone(g, sigma2)) ++w.monotone_cases;

    const auto a = oracle::random_tensor(n, c, rng);
    const auto b = oracle::random_tensor(n, c, rng);
    const double lhs = coin::nn::dot(coin::model::diffusion_forward(a, g, K, sigma2), b);
    const double rhs = coin::nn::dot(a, coin::model::diffusion_backward(b, g, K, sigma2));
    w.adjoint = std::max(w.adjoint, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    ++w.graphs;
  }
  return w;
}

}  // namespace invariants

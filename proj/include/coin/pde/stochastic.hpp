#pragma once

// Gaussian smoothing by quadrature and its Monte Carlo counterpart: the
// Euler-Maruyama simulation of dx = v dt + sqrt(2 sigma2) dB whose expected
// terminal value of f solves du/dt = v u_x + sigma2 u_xx (Feynman-Kac).
// For the 1/2 sigma^2 convention of an SDE with noise sigma dB, pass sigma^2 / 2.

#include <cmath>
#include <cstdint>
#include <vector>

#include "coin/pde/field.hpp"
#include "coin/pde/schemes.hpp"
#include "coin/rng.hpp"

namespace coin::pde {

/// Periodic convolution with a Gaussian of standard deviation `std`, kernel
/// truncated at 8 std and renormalized to unit mass on the grid.
inline Field1D gaussian_smooth_reference(const Field1D& f, double std) {
  if (!(std > 0.0)) throw InputError("gaussian_smooth_reference: std must be positive");
  const std::size_t n = f.grid.n;
  const double dx = f.grid.dx();
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(8.0 * std / dx));
  std::vector<double> weights(static_cast<std::size_t>(2 * reach + 1));
  double total = 0.0;
  for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
    const double d = static_cast<double>(m) * dx;
    const double w = std::exp(-0.5 * d * d / (std * std));
    weights[static_cast<std::size_t>(m + reach)] = w;
    total += w;
  }
  for (double& w : weights) w /= total;

  Field1D out{f.grid, std::vector<double>(n, 0.0), f.time};
  const auto nn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
      std::ptrdiff_t j = (static_cast<std::ptrdiff_t>(i) + m) % nn;
      if (j < 0) j += nn;
      acc += weights[static_cast<std::size_t>(m + reach)] * f.values[static_cast<std::size_t>(j)];
    }
    out.values[i] = acc;
  }
  return out;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline constexpr std::size_t kPathBatch = 1024;

/// Estimates u(x0, horizon) = E[f(X_T) | X_0 = x0] by Euler-Maruyama paths
/// x <- x + v(x, t) dt + sqrt(2 sigma2 dt) xi. Paths are grouped into batches
/// of kPathBatch, each with its own seeded substream, and combined in order.
inline MonteCarloEstimate feynman_kac_mc(const Field1D& f, double x0, const Coefficients& c, double horizon,
                                         std::size_t n_paths, double dt, std::uint64_t seed) {
  if (n_paths < 100) throw InputError("feynman_kac_mc: need at least 100 paths");
  const StepPlan plan = plan_steps(horizon, dt);
  std::vector<double> samples(n_paths);
  const std::size_t n_batches = (n_paths + kPathBatch - 1) / kPathBatch;
  for (std::size_t b = 0; b < n_batches; ++b) {
    Rng rng(derive_seed(seed, b));
    const std::size_t end = std::min(n_paths, (b + 1) * kPathBatch);
    for (std::size_t p = b * kPathBatch; p < end; ++p) {
      double x = x0;
      double t = f.time;
      auto advance = [&](double h) {
        x += c.velocity(x, t) * h + std::sqrt(2.0 * c.sigma2 * h) * rng.normal();
        t += h;
      };
      for (std::size_t k = 0; k < plan.full_steps; ++k) advance(dt);
      if (plan.remainder > 0.0) advance(plan.remainder);
      samples[p] = f.interpolate(x);
    }
  }
  // Shifted by the first sample so a constant f gives its value and zero spread exactly.
  const double shift = samples.front();
  double total = 0.0;
  for (double s : samples) total += s - shift;
  const double offset = total / static_cast<double>(n_paths);
  double sq = 0.0;
  for (double s : samples) sq += (s - shift - offset) * (s - shift - offset);
  const double variance = sq / static_cast<double>(n_paths - 1);
  return {shift + offset, std::sqrt(variance / static_cast<double>(n_paths))};
}

}  // namespace coin::pde

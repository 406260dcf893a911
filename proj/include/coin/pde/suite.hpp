#pragma once

// The desk-scale verification bench run by `coin verify-pde`.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "coin/pde/axioms.hpp"
#include "coin/pde/stochastic.hpp"

namespace coin::pde {

/// Largest stable step for both substeps, scaled by `safety`.
inline double stable_dt(const Grid1D& grid, double max_speed, double sigma2, double safety = 0.8) {
  double dt = std::numeric_limits<double>::infinity();
  if (max_speed > 0.0) dt = std::min(dt, kConvectionCflLimit * grid.dx() / max_speed);
  if (sigma2 > 0.0) dt = std::min(dt, kDiffusionCflLimit * grid.dx() * grid.dx() / sigma2);
  return safety * dt;
}

/// L-infinity error of pure diffusion of a unit Gaussian against the widened
/// closed form N(0, s^2 + 2 sigma2 T).
inline double heat_kernel_error(std::size_t n = 512, double sigma2 = 0.5, double horizon = 1.0) {
  const Grid1D grid(-10.0, 10.0, n);
  const auto density = [](double x, double var) {
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
  };
  const Field1D f = Field1D::sample(grid, [&](double x) { return density(x, 1.0); });
  const double dt = horizon / std::ceil(horizon / stable_dt(grid, 0.0, sigma2));
  const Field1D u = solve_split(f, Coefficients::constant(0.0, sigma2), horizon, dt);
  const Field1D exact = Field1D::sample(grid, [&](double x) { return density(x, 1.0 + 2.0 * sigma2 * horizon); });
  return max_abs_diff(u, exact);
}

/// Drift of the grid mean over `steps` pure-diffusion steps of a rough field.
inline double diffusion_mass_drift(std::size_t steps = 10000, std::uint64_t seed = 11) {
  const Grid1D grid(0.0, 1.0, 256);
  Rng rng(seed);
  Field1D u = Field1D::sample(grid, [&](double) { return rng.uniform(-1.0, 1.0); });
  const double before = u.mean();
  const double sigma2 = 0.1;
  const double dt = stable_dt(grid, 0.0, sigma2, 0.9);
  for (std::size_t k = 0; k < steps; ++k) u = step_diffusion(u, sigma2, dt);
  return std::abs(u.mean() - before);
}

struct ConvergenceStudy {
  double error_coarse = 0.0;  // |u_dt - u_dt/2|
  double error_fine = 0.0;    // |u_dt/2 - u_dt/4|
  double ratio() const { return error_coarse / error_fine; }
  double order() const { return std::log2(ratio()); }
};

/// dt-halving self-convergence of the split scheme with a variable velocity.
inline ConvergenceStudy split_self_convergence(double dt = 0.02) {
  const Grid1D grid(0.0, 2.0 * std::numbers::pi, 128);
  const auto coeffs = Coefficients::variable([](double x, double) { return 0.5 + 0.3 * std::sin(x); }, 0.05);
  const Field1D f = Field1D::sample(grid, [](double x) { return std::exp(std::sin(x)); });
  const double horizon = 1.0;
  const Field1D a = solve_split(f, coeffs, horizon, dt);
  const Field1D b = solve_split(f, coeffs, horizon, dt / 2);
  const Field1D c = solve_split(f, coeffs, horizon, dt / 4);
  return {max_abs_diff(a, b), max_abs_diff(b, c)};
}

struct FeynmanKacTrial {
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double reference = 0.0;
  bool within(double k = 3.0) const { return std::abs(mc_mean - reference) <= k * mc_stderr; }
};

/// v = 0: Monte Carlo versus Gaussian-smoothing quadrature with std sqrt(2 sigma2 T).
inline FeynmanKacTrial feynman_kac_trial(std::uint64_t seed, std::size_t n_paths = 4000) {
  const Grid1D grid(0.0, 2.0 * std::numbers::pi, 256);
  const Field1D f = Field1D::sample(grid, [](double x) { return std::sin(x) + 0.5 * std::cos(2.0 * x); });
  const double sigma2 = 0.1;
  const double horizon = 1.0;
  const double x0 = 1.0;
  const auto est = feynman_kac_mc(f, x0, Coefficients::constant(0.0, sigma2), horizon, n_paths, 0.01, seed);
  const Field1D ref = gaussian_smooth_reference(f, std::sqrt(2.0 * sigma2 * horizon));
  return {est.mean, est.std_error, ref.interpolate(x0)};
}

struct OrnsteinUhlenbeckCheck {
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double exact = 0.0;       // x0 e^{-T}
  double bias_bound = 0.0;  // |x0| T dt e^{-T}, bound on the Euler-Maruyama mean bias
  double residual() const { return std::abs(mc_mean - exact); }
  double threshold() const { return 3.0 * mc_stderr + bias_bound; }
  bool pass() const { return residual() <= threshold(); }
};

/// v(x) = -x, f(x) = x: the mean of the OU process is x0 e^{-T}.
inline OrnsteinUhlenbeckCheck ou_drift_check(std::uint64_t seed = 5, std::size_t n_paths = 4000) {
  const Grid1D grid(-8.0, 8.0, 512);
  const Field1D f = Field1D::sample(grid, [](double x) { return x; });
  const double x0 = 1.0;
  const double horizon = 1.0;
  const double dt = 0.01;
  const auto est =
      feynman_kac_mc(f, x0, Coefficients::variable([](double x, double) { return -x; }, 0.1), horizon, n_paths, dt, seed);
  const double decay = std::exp(-horizon);
  return {est.mean, est.std_error, x0 * decay, std::abs(x0) * horizon * dt * decay};
}

/// Axiom inputs: a rough f, g = f + a non-negative perturbation.
inline AxiomReport default_axiom_report(std::uint64_t seed = 3) {
  const Grid1D grid(0.0, 2.0 * std::numbers::pi, 128);
  const auto coeffs = Coefficients::constant(0.7, 0.05);
  const double dt = stable_dt(grid, 0.7, 0.05);
  Rng rng(seed);
  const Field1D f = Field1D::sample(grid, [&](double x) { return std::sin(x) + 0.3 * rng.uniform(-1.0, 1.0); });
  Field1D g = f;
  for (double& v : g.values) v += 0.1 * rng.uniform();
  return check_axioms(SolverConfig{coeffs, dt}, f, g, 40 * dt, 20 * dt, 5 * grid.dx());
}

struct SuiteOptions {
  std::size_t fk_seeds = 20;
  std::size_t fk_paths = 4000;
  std::uint64_t seed = 0;
};

/// Every check of the bench as (name, residual, threshold, pass) rows.
inline std::vector<AxiomResult> run_pde_suite(const SuiteOptions& opt = {}) {
  std::vector<AxiomResult> rows = default_axiom_report(derive_seed(opt.seed, 1)).results;

  rows.push_back(detail::result("heat_kernel_linf", heat_kernel_error(), 1e-3));
  rows.push_back(detail::result("diffusion_mass_drift", diffusion_mass_drift(), 1e-12));

  const auto conv = split_self_convergence();
  // Observed order must lie in [0.8, 1.2].
  rows.push_back(detail::result("split_convergence_order_dev", std::abs(conv.order() - 1.0), 0.2));

  std::size_t misses = 0;
  for (std::size_t k = 0; k < opt.fk_seeds; ++k) {
    if (!feynman_kac_trial(derive_seed(opt.seed, 100 + k), opt.fk_paths).within()) ++misses;
  }
  const auto allowed = static_cast<double>(opt.fk_seeds) - std::ceil(0.95 * static_cast<double>(opt.fk_seeds));
  rows.push_back(detail::result("feynman_kac_misses", static_cast<double>(misses), allowed));

  const auto ou = ou_drift_check(derive_seed(opt.seed, 2), opt.fk_paths);
  rows.push_back(detail::result("ou_drift", ou.residual(), ou.threshold()));
  return rows;
}

}  // namespace coin::pde

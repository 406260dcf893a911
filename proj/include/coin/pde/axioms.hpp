#pragma once

// Numerical checks of the scale-space axioms on the split solver:
// comparison, Markov (semigroup), linearity with constant preservation,
// spatial regularity (translation commutation) and temporal regularity.
// Locality has no finite test and is not reported.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "coin/pde/schemes.hpp"

namespace coin::pde {

struct SolverConfig {
  Coefficients coeffs;
  double dt = 1e-3;
};

struct AxiomResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct AxiomReport {
  std::vector<AxiomResult> results;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.pass; });
  }
  const AxiomResult& at(const std::string& name) const {
    for (const auto& r : results) {
      if (r.name == name) return r;
    }
    throw InputError("no axiom named " + name);
  }
};

inline constexpr double kLinearityTolerance = 1e-12;
inline constexpr double kMarkovTolerance = 1e-12;
inline constexpr double kConstantTolerance = 1e-13;
inline constexpr double kShiftTolerance = 1e-12;

/// Rolls values so that out(x) = f(x + h) for h = shift_cells * dx.
inline Field1D translate(const Field1D& f, std::ptrdiff_t shift_cells) {
  const auto n = static_cast<std::ptrdiff_t>(f.grid.n);
  Field1D out = f;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::ptrdiff_t j = (i + shift_cells) % n;
    if (j < 0) j += n;
    out.values[static_cast<std::size_t>(i)] = f.values[static_cast<std::size_t>(j)];
  }
  return out;
}

namespace detail {

inline Field1D combine(double a, const Field1D& f, double b, const Field1D& g) {
  Field1D out = f;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * f.values[i] + b * g.values[i];
  return out;
}

inline AxiomResult result(std::string name, double residual, double threshold) {
  return AxiomResult{std::move(name), residual, threshold, residual <= threshold};
}

}  // namespace detail

/// Evaluates every checkable axiom for horizons t and s and a shift h (which
/// must be a whole number of cells). Requires constant coefficients and f <= g.
inline AxiomReport check_axioms(const SolverConfig& cfg, const Field1D& f, const Field1D& g, double t, double s,
                                double h) {
  if (!cfg.coeffs.constant_velocity) {
    throw InputError("check_axioms: translation commutation needs constant coefficients");
  }
  if (!(f.grid == g.grid)) throw InputError("check_axioms: f and g live on different grids");
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] > g.values[i]) throw InputError("check_axioms: comparison needs f <= g pointwise");
  }
  const double cells = h / f.grid.dx();
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, std::abs(cells))) {
    throw InputError("check_axioms: shift " + std::to_string(h) + " is not a whole number of cells (dx = " +
                     std::to_string(f.grid.dx()) + ")");
  }
  const auto shift = static_cast<std::ptrdiff_t>(rounded);
  const auto solve = [&](const Field1D& u, double horizon) { return solve_split(u, cfg.coeffs, horizon, cfg.dt); };

  AxiomReport report;
  const Field1D tf = solve(f, t);
  const Field1D tg = solve(g, t);

  double order_violation = 0.0;
  for (std::size_t i = 0; i < tf.values.size(); ++i) {
    order_violation = std::max(order_violation, tf.values[i] - tg.values[i]);
  }
  report.results.push_back(detail::result("comparison", order_violation, 0.0));

  const Field1D direct = solve(f, t + s);
  const Field1D composed = solve(solve(f, s), t);
  report.results.push_back(detail::result("markov", max_abs_diff(direct, composed), kMarkovTolerance));

  const Field1D lhs = solve(detail::combine(2.0, f, -1.0, g), t);
  const Field1D rhs = detail::combine(2.0, tf, -1.0, tg);
  report.results.push_back(detail::result("linearity", max_abs_diff(lhs, rhs), kLinearityTolerance));

  const Field1D c0 = Field1D::constant(f.grid, 0.7, f.time);
  report.results.push_back(detail::result("constant_preservation", max_abs_diff(solve(c0, t), c0), kConstantTolerance));

  const Field1D shifted_then_solved = solve(translate(f, shift), t);
  const Field1D solved_then_shifted = translate(tf, shift);
  report.results.push_back(
      detail::result("spatial_regularity", max_abs_diff(shifted_then_solved, solved_then_shifted), kShiftTolerance));

  // |T_t f - f| <= t (|C_h f| + |D_h f|) for the monotone constant-coefficient scheme.
  const double bound = sup_norm(convection_generator(f, cfg.coeffs)) + sup_norm(diffusion_generator(f, cfg.coeffs.sigma2));
  double worst_rate = 0.0;
  constexpr int kTimePoints = 8;
  for (int j = 1; j <= kTimePoints; ++j) {
    const double tj = t * static_cast<double>(j) / kTimePoints;
    if (tj <= 0.0) continue;
    worst_rate = std::max(worst_rate, max_abs_diff(solve(f, tj), f) / tj);
  }
  report.results.push_back(detail::result("temporal_regularity", worst_rate, bound * (1.0 + 1e-9) + 1e-12));
  return report;
}

}  // namespace coin::pde

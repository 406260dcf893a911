#pragma once

// Explicit finite-difference steps for du/dt = v u_x + sigma2 u_xx on a
// periodic grid, and the Lie split scheme that alternates them.
//
// Sign convention: the transport term is +v u_x, so values travel along
// dx/dt = -v and a constant v gives u(x, t) = f(x + v t).

#include <cmath>
#include <cstddef>

#include "coin/pde/field.hpp"

namespace coin::pde {

inline constexpr double kDiffusionCflLimit = 0.5;
inline constexpr double kConvectionCflLimit = 1.0;

namespace detail {

// Ratios within round-off of the limit are accepted.
inline bool exceeds(double ratio, double limit) { return ratio > limit * (1.0 + 1e-12); }

}  // namespace detail

inline double diffusion_cfl(const Grid1D& grid, double sigma2, double dt) {
  return sigma2 * dt / (grid.dx() * grid.dx());
}

/// max |v(x_i, t)| over the grid nodes.
inline double max_speed(const Grid1D& grid, const Coefficients& c, double t) {
  double m = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double v = c.velocity(grid.x(i), t);
    if (!std::isfinite(v)) throw InputError("velocity is not finite at x = " + std::to_string(grid.x(i)));
    m = std::max(m, std::abs(v));
  }
  return m;
}

/// Explicit Euler with the periodic 3-point Laplacian.
inline Field1D step_diffusion(const Field1D& f, double sigma2, double dt) {
  const double r = diffusion_cfl(f.grid, sigma2, dt);
  if (detail::exceeds(r, kDiffusionCflLimit)) {
    throw CflError("diffusion step violates sigma2*dt/dx^2 <= 0.5", r, kDiffusionCflLimit);
  }
  const std::size_t n = f.grid.n;
  Field1D out{f.grid, std::vector<double>(n), f.time + dt};
  const auto& u = f.values;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = u[(i + n - 1) % n];
    const double right = u[(i + 1) % n];
    out.values[i] = u[i] + r * ((right - 2.0 * u[i]) + left);
  }
  return out;
}

/// First-order upwind step for du/dt = v u_x, velocity sampled at f.time.
inline Field1D step_convection(const Field1D& f, const Coefficients& c, double dt) {
  const double dx = f.grid.dx();
  const double ratio = max_speed(f.grid, c, f.time) * dt / dx;
  if (detail::exceeds(ratio, kConvectionCflLimit)) {
    throw CflError("convection step violates max|v|*dt/dx <= 1", ratio, kConvectionCflLimit);
  }
  const std::size_t n = f.grid.n;
  Field1D out{f.grid, std::vector<double>(n), f.time + dt};
  const auto& u = f.values;
  const double lambda = dt / dx;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = c.velocity(f.grid.x(i), f.time);
    // Information arrives from the +x side when v > 0.
    const double slope = v > 0.0 ? u[(i + 1) % n] - u[i] : u[i] - u[(i + n - 1) % n];
    out.values[i] = u[i] + lambda * v * slope;
  }
  return out;
}

/// One split step: convection over dt, then diffusion over dt.
inline Field1D step_split(const Field1D& f, const Coefficients& c, double dt) {
  Field1D mid = step_convection(f, c, dt);
  mid.time = f.time;  // diffusion sees the same time level; only the clock advances once
  Field1D out = step_diffusion(mid, c.sigma2, dt);
  out.time = f.time + dt;
  return out;
}

/// Number of full steps and the trailing partial step for a horizon.
struct StepPlan {
  std::size_t full_steps = 0;
  double remainder = 0.0;
};

inline StepPlan plan_steps(double horizon, double dt) {
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  if (!(horizon >= 0.0)) throw InputError("horizon must be non-negative");
  const double ratio = horizon / dt;
  auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  double rem = horizon - static_cast<double>(full) * dt;
  if (rem <= 1e-12 * std::max(1.0, horizon)) rem = 0.0;
  return {full, rem};
}

/// Lie splitting from f.time to f.time + horizon.
inline Field1D solve_split(const Field1D& f, const Coefficients& c, double horizon, double dt) {
  const StepPlan plan = plan_steps(horizon, dt);
  Field1D u = f;
  for (std::size_t k = 0; k < plan.full_steps; ++k) u = step_split(u, c, dt);
  if (plan.remainder > 0.0) u = step_split(u, c, plan.remainder);
  return u;
}

/// Upwind transport term v u_x and diffusion term sigma2 u_xx as applied by one
/// step, divided by dt (the discrete generators).
inline std::vector<double> convection_generator(const Field1D& f, const Coefficients& c) {
  const std::size_t n = f.grid.n;
  const double dx = f.grid.dx();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = c.velocity(f.grid.x(i), f.time);
    const double slope = v > 0.0 ? f.values[(i + 1) % n] - f.values[i] : f.values[i] - f.values[(i + n - 1) % n];
    out[i] = v * slope / dx;
  }
  return out;
}

inline std::vector<double> diffusion_generator(const Field1D& f, double sigma2) {
  const std::size_t n = f.grid.n;
  const double dx2 = f.grid.dx() * f.grid.dx();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = sigma2 * (f.values[(i + 1) % n] - 2.0 * f.values[i] + f.values[(i + n - 1) % n]) / dx2;
  }
  return out;
}

}  // namespace coin::pde

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coin/error.hpp"

namespace coin::pde {

/// Uniform periodic grid on [x_min, x_max); node i sits at x_min + i * dx.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 64;

  Grid1D() = default;
  Grid1D(double lo, double hi, std::size_t cells) : x_min(lo), x_max(hi), n(cells) {
    if (n < 8) throw InputError("Grid1D: need at least 8 cells, got " + std::to_string(n));
    if (!(x_max > x_min)) throw InputError("Grid1D: x_max must exceed x_min");
  }

  double dx() const noexcept { return (x_max - x_min) / static_cast<double>(n); }
  double length() const noexcept { return x_max - x_min; }
  double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx(); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

/// Samples of u(., time) on a grid.
struct Field1D {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;

  static Field1D sample(const Grid1D& grid, const std::function<double(double)>& f, double time = 0.0) {
    Field1D out{grid, std::vector<double>(grid.n), time};
    for (std::size_t i = 0; i < grid.n; ++i) out.values[i] = f(grid.x(i));
    return out;
  }

  static Field1D constant(const Grid1D& grid, double c, double time = 0.0) {
    return Field1D{grid, std::vector<double>(grid.n, c), time};
  }

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }

  /// Periodic linear interpolation at an arbitrary x.
  double interpolate(double x) const {
    const double s = (x - grid.x_min) / grid.dx();
    const double n = static_cast<double>(grid.n);
    double wrapped = std::fmod(s, n);
    if (wrapped < 0.0) wrapped += n;
    auto i = static_cast<std::size_t>(wrapped);
    if (i >= grid.n) i = grid.n - 1;
    const double frac = wrapped - static_cast<double>(i);
    return values[i] + frac * (values[(i + 1) % grid.n] - values[i]);
  }
};

inline double max_abs_diff(const Field1D& a, const Field1D& b) {
  if (a.values.size() != b.values.size()) throw ShapeError("field sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Velocity v(x, t) and isotropic diffusion strength of du/dt = v u_x + sigma2 u_xx.
struct Coefficients {
  std::function<double(double, double)> velocity = [](double, double) { return 0.0; };
  double sigma2 = 0.0;
  std::optional<double> constant_velocity;  // set when v does not depend on (x, t)

  static Coefficients constant(double v, double sigma2) {
    Coefficients c;
    c.velocity = [v](double, double) { return v; };
    c.sigma2 = sigma2;
    c.constant_velocity = v;
    return c;
  }

  static Coefficients variable(std::function<double(double, double)> v, double sigma2) {
    Coefficients c;
    c.velocity = std::move(v);
    c.sigma2 = sigma2;
    return c;
  }
};

}  // namespace coin::pde

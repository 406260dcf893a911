#pragma once

// Forward and backward kernels for the dense layers of the classifier.
// Backward functions ACCUMULATE into Param::grad.

#include <algorithm>
#include <cmath>
#include <vector>

#include "coin/nn/tensor.hpp"
#include "coin/rng.hpp"

namespace coin::nn {

namespace detail {

inline void check_linear_shapes(std::size_t x_cols, const std::string& x_shape, const Param& weight,
                                const Param& bias) {
  if (x_cols != weight.value.rows()) {
    throw ShapeError("linear: input " + x_shape + " incompatible with weight " + weight.value.shape());
  }
  if (bias.value.rows() != 1 || bias.value.cols() != weight.value.cols()) {
    throw ShapeError("linear: bias " + bias.value.shape() + " incompatible with weight " +
                     weight.value.shape());
  }
}

}  // namespace detail

/// out = X * W + broadcast(b)
inline Tensor linear_forward(const Tensor& x, const Param& weight, const Param& bias) {
  detail::check_linear_shapes(x.cols(), x.shape(), weight, bias);
  const std::size_t out_cols = weight.value.cols();
  Tensor out(x.rows(), out_cols);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto o = out.row(i);
    std::copy(bias.value.row(0).begin(), bias.value.row(0).end(), o.begin());
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double xv = x(i, k);
      if (xv == 0.0) continue;
      const auto w = weight.value.row(k);
      for (std::size_t j = 0; j < out_cols; ++j) o[j] += xv * w[j];
    }
  }
  return out;
}

/// Accumulates dW += X^T dOut and db += colsum(dOut); returns dX = dOut W^T.
inline Tensor linear_backward(const Tensor& x, Param& weight, Param& bias, const Tensor& d_out) {
  detail::check_linear_shapes(x.cols(), x.shape(), weight, bias);
  if (d_out.rows() != x.rows() || d_out.cols() != weight.value.cols()) {
    throw ShapeError("linear backward: upstream gradient " + d_out.shape() + " vs expected [" +
                     std::to_string(x.rows()) + "x" + std::to_string(weight.value.cols()) + "]");
  }
  const std::size_t out_cols = weight.value.cols();
  Tensor dx(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto g = d_out.row(i);
    auto db = bias.grad.row(0);
    for (std::size_t j = 0; j < out_cols; ++j) db[j] += g[j];
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const auto w = weight.value.row(k);
      auto dw = weight.grad.row(k);
      const double xv = x(i, k);
      double acc = 0.0;
      for (std::size_t j = 0; j < out_cols; ++j) {
        acc += g[j] * w[j];
        dw[j] += xv * g[j];
      }
      dx(i, k) = acc;
    }
  }
  return dx;
}

/// Sparse-input variant of linear_forward.
inline Tensor linear_forward(const SparseRows& x, const Param& weight, const Param& bias) {
  detail::check_linear_shapes(x.cols(), x.shape(), weight, bias);
  const std::size_t out_cols = weight.value.cols();
  Tensor out(x.rows(), out_cols);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto o = out.row(i);
    std::copy(bias.value.row(0).begin(), bias.value.row(0).end(), o.begin());
    for (std::size_t k = x.row_begin(i); k < x.row_end(i); ++k) {
      const double xv = x.value(k);
      const auto w = weight.value.row(x.col(k));
      for (std::size_t j = 0; j < out_cols; ++j) o[j] += xv * w[j];
    }
  }
  return out;
}

/// Sparse-input backward; the input is data, so only parameter gradients are produced.
inline void linear_backward_params(const SparseRows& x, Param& weight, Param& bias,
                                   const Tensor& d_out) {
  detail::check_linear_shapes(x.cols(), x.shape(), weight, bias);
  if (d_out.rows() != x.rows() || d_out.cols() != weight.value.cols()) {
    throw ShapeError("linear backward: upstream gradient " + d_out.shape() + " vs input " +
                     x.shape());
  }
  const std::size_t out_cols = weight.value.cols();
  auto db = bias.grad.row(0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto g = d_out.row(i);
    for (std::size_t j = 0; j < out_cols; ++j) db[j] += g[j];
    for (std::size_t k = x.row_begin(i); k < x.row_end(i); ++k) {
      const double xv = x.value(k);
      auto dw = weight.grad.row(x.col(k));
      for (std::size_t j = 0; j < out_cols; ++j) dw[j] += xv * g[j];
    }
  }
}

inline Tensor relu_forward(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

/// Gates the upstream gradient by (x > 0); the subgradient at 0 is 0.
inline Tensor relu_backward(const Tensor& x, const Tensor& d_out) {
  require_same_shape(x, d_out, "relu backward");
  Tensor dx = d_out;
  for (std::size_t k = 0; k < dx.size(); ++k) {
    if (!(x.values()[k] > 0.0)) dx.values()[k] = 0.0;
  }
  return dx;
}

/// Row-wise softmax with max subtraction.
inline Tensor softmax_rows(const Tensor& x) {
  if (x.cols() == 0) throw ShapeError("softmax_rows: need at least one column");
  Tensor out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto in = x.row(i);
    auto o = out.row(i);
    const double m = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - m);
      total += o[j];
    }
    for (double& v : o) v /= total;
  }
  return out;
}

/// Given y = softmax(x) and dL/dy, returns dL/dx = y * (dy - <dy, y>).
inline Tensor softmax_backward(const Tensor& y, const Tensor& d_out) {
  require_same_shape(y, d_out, "softmax backward");
  Tensor dx(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yr = y.row(i);
    const auto gr = d_out.row(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < yr.size(); ++j) inner += yr[j] * gr[j];
    auto d = dx.row(i);
    for (std::size_t j = 0; j < yr.size(); ++j) d[j] = yr[j] * (gr[j] - inner);
  }
  return dx;
}

/// Inverted-dropout multipliers: 0 for dropped entries, 1/(1-rate) for survivors.
struct DropoutMask {
  std::vector<double> scale;  // empty means identity
};

inline void check_dropout_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InputError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

inline Tensor dropout_forward(const Tensor& x, double rate, Rng& rng, bool training,
                              DropoutMask& mask) {
  check_dropout_rate(rate);
  mask.scale.clear();
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  mask.scale.resize(x.size());
  Tensor out = x;
  for (std::size_t k = 0; k < out.size(); ++k) {
    mask.scale[k] = rng.bernoulli(rate) ? 0.0 : keep_scale;
    out.values()[k] *= mask.scale[k];
  }
  return out;
}

inline Tensor dropout_backward(const DropoutMask& mask, const Tensor& d_out) {
  if (mask.scale.empty()) return d_out;
  if (mask.scale.size() != d_out.size()) {
    throw ShapeError("dropout backward: mask size does not match gradient " + d_out.shape());
  }
  Tensor dx = d_out;
  for (std::size_t k = 0; k < dx.size(); ++k) dx.values()[k] *= mask.scale[k];
  return dx;
}

}  // namespace coin::nn

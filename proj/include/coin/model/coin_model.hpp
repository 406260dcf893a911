#pragma once

// The COIN network: a shallow residual classifier that outputs class
// probabilities u0, followed by K graph diffusion layers acting on u0.
//
//   z  = X W_in + b_in
//   r  = z + (relu(z W_1 + b_1) W_2 + b_2)      (the "+ z" is dropped when residual = false)
//   u0 = softmax(r W_out + b_out)
//   uK = (I - sigma2 L)^K u0                      (optional dropout after each layer)

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "coin/model/config.hpp"
#include "coin/model/diffusion.hpp"
#include "coin/nn/checkpoint.hpp"
#include "coin/nn/layers.hpp"
#include "coin/rng.hpp"

namespace coin::model {

struct CoinModel {
  nn::Param w_in, b_in;
  nn::Param w_1, b_1;
  nn::Param w_2, b_2;
  nn::Param w_out, b_out;
  CoinConfig config;

  std::size_t input_dim() const noexcept { return w_in.value.rows(); }
  std::size_t n_classes() const noexcept { return w_out.value.cols(); }

  std::array<nn::Param*, 8> params() noexcept { return {&w_in, &b_in, &w_1, &b_1, &w_2, &b_2, &w_out, &b_out}; }
  std::array<const nn::Param*, 8> params() const noexcept {
    return {&w_in, &b_in, &w_1, &b_1, &w_2, &b_2, &w_out, &b_out};
  }
  static constexpr std::array<const char*, 8> kParamNames{"w_in", "b_in", "w_1",   "b_1",
                                                          "w_2",  "b_2",  "w_out", "b_out"};

  void zero_grad() {
    for (auto* p : params()) p->zero_grad();
  }

  nn::NamedTensors state() const {
    nn::NamedTensors out;
    const auto ps = params();
    for (std::size_t k = 0; k < ps.size(); ++k) out.emplace_back(kParamNames[k], ps[k]->value);
    return out;
  }

  void load_state(const nn::NamedTensors& tensors) {
    const auto ps = params();
    if (tensors.size() != ps.size()) throw InputError("checkpoint has " + std::to_string(tensors.size()) + " tensors, expected 8");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (tensors[k].first != kParamNames[k]) {
        throw InputError("checkpoint tensor '" + tensors[k].first + "' where '" + kParamNames[k] + "' expected");
      }
      nn::require_same_shape(ps[k]->value, tensors[k].second, kParamNames[k]);
      ps[k]->value = tensors[k].second;
    }
  }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
inline nn::Param init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  nn::Tensor t(rows, cols);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return nn::Param(std::move(t));
}

inline CoinModel make_model(std::size_t input_dim, std::size_t n_classes, const CoinConfig& config,
                            std::uint64_t init_seed) {
  config.validate();
  if (input_dim == 0 || n_classes == 0) throw ShapeError("model needs a non-empty input and at least one class");
  Rng rng(init_seed);
  const std::size_t h = config.hidden_dim;
  CoinModel m;
  m.config = config;
  m.w_in = init_uniform(input_dim, h, input_dim, rng);
  m.b_in = init_uniform(1, h, input_dim, rng);
  m.w_1 = init_uniform(h, h, h, rng);
  m.b_1 = init_uniform(1, h, h, rng);
  m.w_2 = init_uniform(h, h, h, rng);
  m.b_2 = init_uniform(1, h, h, rng);
  m.w_out = init_uniform(h, n_classes, h, rng);
  m.b_out = init_uniform(1, n_classes, h, rng);
  return m;
}

/// Intermediates kept for the backward pass.
struct ForwardCache {
  nn::Tensor z;   // input projection
  nn::Tensor a;   // pre-activation of the inner layer
  nn::Tensor h;   // relu(a)
  nn::Tensor r;   // block output (residual sum)
  nn::Tensor u0;  // classifier probabilities
  DiffusionTrace diffusion;

  const nn::Tensor& output() const noexcept { return diffusion.output; }
};

namespace detail {

inline void check_finite(const nn::Tensor& t, const char* layer) {
#ifndef NDEBUG
  if (!t.all_finite()) throw NumericError(std::string("non-finite activation in layer ") + layer);
#else
  (void)t;
  (void)layer;
#endif
}

}  // namespace detail

inline ForwardCache forward(const CoinModel& m, const nn::SparseRows& x, const graph::SparseGraph& g, bool training,
                            Rng& rng) {
  if (x.rows() != g.n_nodes()) {
    throw ShapeError("forward: " + std::to_string(x.rows()) + " feature rows for a " + std::to_string(g.n_nodes()) +
                     "-node graph");
  }
  ForwardCache c;
  c.z = nn::linear_forward(x, m.w_in, m.b_in);
  detail::check_finite(c.z, "input");
  c.a = nn::linear_forward(c.z, m.w_1, m.b_1);
  c.h = nn::relu_forward(c.a);
  c.r = nn::linear_forward(c.h, m.w_2, m.b_2);
  if (m.config.residual) {
    auto r = c.r.values();
    const auto z = c.z.values();
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += z[k];
  }
  detail::check_finite(c.r, "residual block");
  c.u0 = nn::softmax_rows(nn::linear_forward(c.r, m.w_out, m.b_out));
  detail::check_finite(c.u0, "softmax");
  c.diffusion = diffusion_forward_dropout(c.u0, g, m.config.K, m.config.sigma2, m.config.dropout_rate, rng, training);
  detail::check_finite(c.diffusion.output, "diffusion");
  return c;
}

inline ForwardCache forward(const CoinModel& m, const nn::Tensor& x, const graph::SparseGraph& g, bool training,
                            Rng& rng) {
  return forward(m, nn::SparseRows::from_dense(x), g, training, rng);
}

/// Accumulates parameter gradients given dL/du^K.
inline void backward(CoinModel& m, const ForwardCache& c, const nn::SparseRows& x, const graph::SparseGraph& g,
                     const nn::Tensor& d_uK) {
  const nn::Tensor d_u0 = diffusion_backward_dropout(d_uK, g, c.diffusion, m.config.sigma2);
  const nn::Tensor d_logits = nn::softmax_backward(c.u0, d_u0);
  const nn::Tensor d_r = nn::linear_backward(c.r, m.w_out, m.b_out, d_logits);
  const nn::Tensor d_h = nn::linear_backward(c.h, m.w_2, m.b_2, d_r);
  const nn::Tensor d_a = nn::relu_backward(c.a, d_h);
  nn::Tensor d_z = nn::linear_backward(c.z, m.w_1, m.b_1, d_a);
  if (m.config.residual) {
    auto dz = d_z.values();
    const auto dr = d_r.values();
    for (std::size_t k = 0; k < dz.size(); ++k) dz[k] += dr[k];
  }
  nn::linear_backward_params(x, m.w_in, m.b_in, d_z);
}

}  // namespace coin::model

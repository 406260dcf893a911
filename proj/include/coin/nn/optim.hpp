#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coin/nn/tensor.hpp"

namespace coin::nn {

enum class OptimizerKind { adam, sgd_momentum };

inline std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::adam ? "adam" : "sgd";
}

inline OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd" || name == "sgd-momentum") return OptimizerKind::sgd_momentum;
  throw InputError("unknown optimizer '" + name + "' (expected adam or sgd)");
}

/// Hyper-parameters plus per-parameter moment buffers.
///
/// Weight decay is classical L2: `weight_decay * p` is added to the gradient
/// before the moment updates (not decoupled).
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 0.01;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double momentum = 0.9;
  std::size_t step_count = 0;
  std::vector<Tensor> first_moment;   // adam m, or sgd velocity
  std::vector<Tensor> second_moment;  // adam v
};

inline OptimizerState make_adam(double lr, double weight_decay) {
  OptimizerState s;
  s.kind = OptimizerKind::adam;
  s.lr = lr;
  s.weight_decay = weight_decay;
  return s;
}

inline OptimizerState make_sgd(double lr, double momentum, double weight_decay) {
  OptimizerState s;
  s.kind = OptimizerKind::sgd_momentum;
  s.lr = lr;
  s.momentum = momentum;
  s.weight_decay = weight_decay;
  return s;
}

/// One update of every parameter in `params` from its accumulated gradient.
/// Buffers are allocated on the first call and must keep the same parameter order afterwards.
inline void optimizer_step(OptimizerState& state, std::span<Param* const> params) {
  if (state.first_moment.empty()) {
    for (const Param* p : params) {
      state.first_moment.emplace_back(p->value.rows(), p->value.cols());
      if (state.kind == OptimizerKind::adam) {
        state.second_moment.emplace_back(p->value.rows(), p->value.cols());
      }
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("optimizer_step: parameter list changed between steps");
  }
  ++state.step_count;
  const auto t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    Tensor& m = state.first_moment[k];
    require_same_shape(p.value, m, "optimizer_step");
    auto value = p.value.values();
    const auto grad = p.grad.values();
    auto m_data = m.values();
    if (state.kind == OptimizerKind::adam) {
      auto v_data = state.second_moment[k].values();
      for (std::size_t i = 0; i < value.size(); ++i) {
        const double g = grad[i] + state.weight_decay * value[i];
        m_data[i] = state.beta1 * m_data[i] + (1.0 - state.beta1) * g;
        v_data[i] = state.beta2 * v_data[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = m_data[i] / bias1;
        const double v_hat = v_data[i] / bias2;
        value[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
      }
    } else {
      for (std::size_t i = 0; i < value.size(); ++i) {
        const double g = grad[i] + state.weight_decay * value[i];
        m_data[i] = state.momentum * m_data[i] + g;
        value[i] -= state.lr * m_data[i];
      }
    }
  }
}

/// Multi-step schedule: x0.1 at half the horizon, x0.01 from three quarters on.
inline double multistep_lr(std::size_t epoch, std::size_t total_epochs, double base_lr) {
  const double e = static_cast<double>(epoch);
  const double total = static_cast<double>(total_epochs);
  if (e < 0.5 * total) return base_lr;
  if (e < 0.75 * total) return 0.1 * base_lr;
  return 0.01 * base_lr;
}

}  // namespace coin::nn

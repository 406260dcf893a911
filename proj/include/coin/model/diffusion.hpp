#pragma once

// Graph diffusion layers: u^{k+1} = u^k - sigma2 * L u^k, the forward-Euler
// discretization of du/dt = sigma2 * Laplacian(u) on the graph.

#include <vector>

#include "coin/graph/ops.hpp"
#include "coin/nn/layers.hpp"

namespace coin::model {

/// One explicit Euler step (I - sigma2 L) u.
inline nn::Tensor diffusion_step(const nn::Tensor& u, const graph::SparseGraph& g, double sigma2) {
  nn::Tensor out = u;
  if (sigma2 == 0.0) return out;
  const nn::Tensor lu = graph::laplacian_apply(g, u);
  auto o = out.values();
  const auto l = lu.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] -= sigma2 * l[k];
  return out;
}

inline void check_sigma2(double sigma2) {
  if (!(sigma2 >= 0.0)) throw InputError("diffusion: sigma2 must be >= 0");
}

/// Applies K diffusion layers.
inline nn::Tensor diffusion_forward(const nn::Tensor& u0, const graph::SparseGraph& g, std::size_t K,
                                    double sigma2) {
  check_sigma2(sigma2);
  if (u0.rows() != g.n_nodes()) {
    throw ShapeError("diffusion: input " + u0.shape() + " for a " + std::to_string(g.n_nodes()) + "-node graph");
  }
  nn::Tensor u = u0;
  for (std::size_t k = 0; k < K; ++k) u = diffusion_step(u, g, sigma2);
  return u;
}

/// Adjoint of diffusion_forward: applies (I - sigma2 L)^T K times. For a
/// symmetric graph L^T = L, so this is the forward map itself.
inline nn::Tensor diffusion_backward(const nn::Tensor& d_uK, const graph::SparseGraph& g, std::size_t K,
                                     double sigma2) {
  return diffusion_forward(d_uK, g, K, sigma2);
}

/// Diffusion layers with inverted dropout after each Euler update.
struct DiffusionTrace {
  nn::Tensor output;
  std::vector<nn::DropoutMask> masks;  // one per layer
};

inline DiffusionTrace diffusion_forward_dropout(const nn::Tensor& u0, const graph::SparseGraph& g, std::size_t K,
                                                double sigma2, double rate, Rng& rng, bool training) {
  check_sigma2(sigma2);
  DiffusionTrace trace;
  trace.masks.resize(K);
  nn::Tensor u = u0;
  for (std::size_t k = 0; k < K; ++k) {
    u = diffusion_step(u, g, sigma2);
    u = nn::dropout_forward(u, rate, rng, training, trace.masks[k]);
  }
  trace.output = std::move(u);
  return trace;
}

inline nn::Tensor diffusion_backward_dropout(const nn::Tensor& d_uK, const graph::SparseGraph& g,
                                             const DiffusionTrace& trace, double sigma2) {
  nn::Tensor d = d_uK;
  for (std::size_t k = trace.masks.size(); k-- > 0;) {
    d = nn::dropout_backward(trace.masks[k], d);
    d = diffusion_step(d, g, sigma2);
  }
  return d;
}

}  // namespace coin::model

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "coin/nn/tensor.hpp"

namespace coin::nn {

using IndexSet = std::vector<std::size_t>;

/// Floor applied to probabilities before taking the log.
inline constexpr double kProbFloor = 1e-12;

namespace detail {

inline void check_mask(const IndexSet& mask, std::size_t rows, const char* what) {
  if (mask.empty()) throw InputError(std::string(what) + ": empty mask");
  for (std::size_t i : mask) {
    if (i >= rows) {
      throw ShapeError(std::string(what) + ": mask index " + std::to_string(i) + " out of range for " +
                       std::to_string(rows) + " rows");
    }
  }
}

inline void check_labels(const Tensor& probs, const std::vector<int>& labels, const IndexSet& mask,
                         const char* what) {
  if (labels.size() != probs.rows()) {
    throw ShapeError(std::string(what) + ": " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(probs.rows()) + " rows");
  }
  for (std::size_t i : mask) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= probs.cols()) {
      throw InputError(std::string(what) + ": label " + std::to_string(labels[i]) + " at row " +
                       std::to_string(i) + " outside [0," + std::to_string(probs.cols()) + ")");
    }
  }
}

}  // namespace detail

/// Mean negative log-likelihood over the masked rows; consumes probabilities, not logits.
inline double nll_masked(const Tensor& probs, const std::vector<int>& labels, const IndexSet& mask) {
  detail::check_mask(mask, probs.rows(), "nll_masked");
  detail::check_labels(probs, labels, mask, "nll_masked");
  double total = 0.0;
  for (std::size_t i : mask) {
    total -= std::log(std::max(probs(i, static_cast<std::size_t>(labels[i])), kProbFloor));
  }
  return total / static_cast<double>(mask.size());
}

/// Gradient of nll_masked with respect to the probabilities; zero outside the mask.
/// Entries below the floor get zero gradient, matching the clamp in the forward pass.
inline Tensor nll_masked_backward(const Tensor& probs, const std::vector<int>& labels,
                                  const IndexSet& mask) {
  detail::check_mask(mask, probs.rows(), "nll_masked");
  detail::check_labels(probs, labels, mask, "nll_masked");
  Tensor grad(probs.rows(), probs.cols());
  const double scale = 1.0 / static_cast<double>(mask.size());
  for (std::size_t i : mask) {
    const auto c = static_cast<std::size_t>(labels[i]);
    const double p = probs(i, c);
    if (p > kProbFloor) grad(i, c) -= scale / p;
  }
  return grad;
}

/// Number of masked target probabilities that hit the log floor.
inline std::size_t nll_clamped_count(const Tensor& probs, const std::vector<int>& labels,
                                     const IndexSet& mask) {
  std::size_t count = 0;
  for (std::size_t i : mask) {
    if (probs(i, static_cast<std::size_t>(labels[i])) <= kProbFloor) ++count;
  }
  return count;
}

/// Mean squared error over masked rows of single-column tensors.
inline double mse_masked(const Tensor& pred, const Tensor& target, const IndexSet& mask) {
  require_same_shape(pred, target, "mse_masked");
  detail::check_mask(mask, pred.rows(), "mse_masked");
  double total = 0.0;
  for (std::size_t i : mask) {
    for (std::size_t j = 0; j < pred.cols(); ++j) {
      const double d = pred(i, j) - target(i, j);
      total += d * d;
    }
  }
  return total / static_cast<double>(mask.size() * pred.cols());
}

inline Tensor mse_masked_backward(const Tensor& pred, const Tensor& target, const IndexSet& mask) {
  require_same_shape(pred, target, "mse_masked");
  detail::check_mask(mask, pred.rows(), "mse_masked");
  Tensor grad(pred.rows(), pred.cols());
  const double scale = 2.0 / static_cast<double>(mask.size() * pred.cols());
  for (std::size_t i : mask) {
    for (std::size_t j = 0; j < pred.cols(); ++j) grad(i, j) = scale * (pred(i, j) - target(i, j));
  }
  return grad;
}

}  // namespace coin::nn

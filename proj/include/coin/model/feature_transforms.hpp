#pragma once

// Feature preprocessing for kernel graphs built from pretrained embeddings:
// centering on a base mean, L2 row normalization, and a cross-domain shift
// that moves the query mean onto the support mean.

#include <cmath>
#include <span>
#include <vector>

#include "coin/nn/tensor.hpp"

namespace coin::model {

inline constexpr double kMinRowNorm = 1e-12;

struct TransformedFeatures {
  nn::Tensor support;
  nn::Tensor query;
  std::size_t degenerate_rows = 0;  // rows whose norm was floored
};

namespace detail {

inline std::size_t center_and_normalize(nn::Tensor& x, std::span<const double> base_mean) {
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    double sq = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] -= base_mean[j];
      sq += r[j] * r[j];
    }
    double norm = std::sqrt(sq);
    if (norm < kMinRowNorm) {
      norm = kMinRowNorm;
      ++degenerate;
    }
    for (double& v : r) v /= norm;
  }
  return degenerate;
}

inline std::vector<double> column_mean(const nn::Tensor& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
  }
  for (double& v : mean) v /= static_cast<double>(x.rows());
  return mean;
}

}  // namespace detail

inline TransformedFeatures feature_transforms(const nn::Tensor& support, const nn::Tensor& query,
                                              std::span<const double> base_mean) {
  if (support.rows() == 0 || query.rows() == 0) throw InputError("feature_transforms: empty support or query set");
  if (support.cols() != query.cols() || base_mean.size() != support.cols()) {
    throw ShapeError("feature_transforms: support " + support.shape() + ", query " + query.shape() + " and a " +
                     std::to_string(base_mean.size()) + "-dim base mean disagree");
  }
  TransformedFeatures out{support, query, 0};
  out.degenerate_rows = detail::center_and_normalize(out.support, base_mean) +
                        detail::center_and_normalize(out.query, base_mean);
  const auto s_mean = detail::column_mean(out.support);
  const auto q_mean = detail::column_mean(out.query);
  for (std::size_t i = 0; i < out.query.rows(); ++i) {
    auto r = out.query.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += s_mean[j] - q_mean[j];
  }
  return out;
}

}  // namespace coin::model

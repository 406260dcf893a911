#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coin/error.hpp"

namespace coin::nn {

/// Dense row-major matrix of doubles.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  /// Build from nested rows; all rows must have equal length.
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Tensor t(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw ShapeError("ragged rows in Tensor::from_rows");
      std::copy(row.begin(), row.end(), t.row(i).begin());
      ++i;
    }
    return t;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  std::string shape() const { return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]"; }

  bool same_shape(const Tensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A trainable value with its accumulated gradient.
struct Param {
  Param() = default;
  explicit Param(Tensor v) : value(std::move(v)), grad(value.rows(), value.cols()) {}

  Tensor value;
  Tensor grad;

  void zero_grad() { grad.fill(0.0); }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape() + " vs " + b.shape());
  }
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  }
  return m;
}

inline double dot(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.values()[k] * b.values()[k];
  return s;
}

/// Compressed-row real matrix; used for bag-of-words input features.
class SparseRows {
 public:
  SparseRows() = default;

  static SparseRows from_dense(const Tensor& dense) {
    SparseRows s;
    s.rows_ = dense.rows();
    s.cols_ = dense.cols();
    s.offsets_.reserve(s.rows_ + 1);
    for (std::size_t i = 0; i < dense.rows(); ++i) {
      for (std::size_t j = 0; j < dense.cols(); ++j) {
        const double v = dense(i, j);
        if (v != 0.0) {
          s.cols_idx_.push_back(j);
          s.vals_.push_back(v);
        }
      }
      s.offsets_.push_back(s.vals_.size());
    }
    return s;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return vals_.size(); }
  std::size_t row_begin(std::size_t i) const noexcept { return offsets_[i]; }
  std::size_t row_end(std::size_t i) const noexcept { return offsets_[i + 1]; }
  std::size_t col(std::size_t k) const noexcept { return cols_idx_[k]; }
  double value(std::size_t k) const noexcept { return vals_[k]; }

  std::string shape() const { return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]"; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> cols_idx_;
  std::vector<double> vals_;
};

}  // namespace coin::nn

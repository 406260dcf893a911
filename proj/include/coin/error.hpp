#pragma once

#include <stdexcept>
#include <string>

namespace coin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or graph dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input (files, arguments, configs).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A time step violates the stability restriction of an explicit scheme.
class CflError : public Error {
 public:
  CflError(const std::string& what, double ratio, double limit)
      : Error(what + " (ratio " + std::to_string(ratio) + " > " + std::to_string(limit) + ")"),
        ratio_(ratio),
        limit_(limit) {}

  double ratio() const noexcept { return ratio_; }
  double limit() const noexcept { return limit_; }

 private:
  double ratio_;
  double limit_;
};

/// Training produced a NaN or infinite loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace coin

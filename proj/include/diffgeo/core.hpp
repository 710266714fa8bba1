#pragma once
// Common aliases and the exception hierarchy shared by every diffgeo module.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffgeo {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised for violated preconditions (bad sizes, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails (eigensolver breakdown, NaNs).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an assembly would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t required_bytes)
      : std::runtime_error(what + " (requires " + std::to_string(required_bytes) + " bytes)"),
        required_bytes_(required_bytes) {}
  std::size_t required_bytes() const noexcept { return required_bytes_; }

 private:
  std::size_t required_bytes_;
};

/// Raised when a Gram matrix has no eigenvalue above the rank threshold.
class DegenerateSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the CSV/JSON readers; carries the 1-based offending row when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error(what + " at row " + std::to_string(row)), row_(row) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), row_(0) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace detail
}  // namespace diffgeo

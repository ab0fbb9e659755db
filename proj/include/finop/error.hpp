#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace finop {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two operands live on different grids (N, M or p disagree).
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// A construct cannot be represented on the current grid; `required_p` is the
// smallest grid (cells per axis) on which it would be.
class RefinementRequired : public Error {
 public:
  RefinementRequired(const std::string& what, std::int64_t required_p)
      : Error(what + " (refine to p=" + std::to_string(required_p) + ")"),
        required_p_(required_p) {}

  std::int64_t required_p() const noexcept { return required_p_; }

 private:
  std::int64_t required_p_;
};

// Matrix dimension K exceeds the configured cap.
class SizeLimitExceeded : public Error {
 public:
  SizeLimitExceeded(std::size_t requested, std::size_t limit)
      : Error("dimension " + std::to_string(requested) + " exceeds limit " +
              std::to_string(limit) + " (FINOP_MAX_K)"),
        requested_(requested),
        limit_(limit) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t requested_;
  std::size_t limit_;
};

// Numerical kernel failed (eigensolver non-convergence, overflow in exp).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace finop

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bskm {

/// Violated precondition of a library operation (bad index, empty selection,
/// out-of-range parameter).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed Matrix Market or CSV input. `line()` is 1-based; 0 when the
/// problem is not tied to a particular line (e.g. premature end of file is
/// reported against the last line read).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The reference solve left a residual too large for Ax=b to be consistent.
class InconsistentSystem : public std::runtime_error {
 public:
  InconsistentSystem(double relative_residual, const std::string& what)
      : std::runtime_error(what), relative_residual_(relative_residual) {}

  [[nodiscard]] double relative_residual() const noexcept { return relative_residual_; }

 private:
  double relative_residual_;
};

/// Exhaustive enumeration would exceed the configured number of samples.
class EnumerationLimitExceeded : public std::runtime_error {
 public:
  EnumerationLimitExceeded(double count, double limit, const std::string& what)
      : std::runtime_error(what), count_(count), limit_(limit) {}

  [[nodiscard]] double count() const noexcept { return count_; }
  [[nodiscard]] double limit() const noexcept { return limit_; }

 private:
  double count_;
  double limit_;
};

/// A quantity that is mathematically undefined for the given input
/// (zero residual in a ratio, zero reference vector in RES).
class UndefinedQuantity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace bskm

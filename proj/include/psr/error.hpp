#pragma once

#include <stdexcept>
#include <string>

namespace psr {

enum class ErrorKind {
  Validation,  // bad dimensions, arguments or file contents
  Numerical,   // solver failure, non-finite values, divergence
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Raised by iterative solves and the unrolled network. `residual` is the last
/// relative residual for linear solves; `sweep` is the iteration index (or -1).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual = 0.0, int sweep = -1);
  double residual() const noexcept { return residual_; }
  int sweep() const noexcept { return sweep_; }

 private:
  double residual_;
  int sweep_;
};

}  // namespace psr

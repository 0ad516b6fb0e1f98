#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rgsde {

enum class ErrorKind {
  InvalidArgument,
  ConstraintViolation,
  ObstacleViolation,
  ResourceLimit,
  NonConvergence,
  NumericFailure,
  UnsupportedModulus,
  IllPosedCase,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Residual history of a failed Picard run (empty for other kinds).
  const std::vector<double>& residuals() const noexcept { return residuals_; }
  Error& with_residuals(std::vector<double> r) {
    residuals_ = std::move(r);
    return *this;
  }

 private:
  ErrorKind kind_;
  std::vector<double> residuals_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// Rethrows `e` with `context` prepended, keeping kind and residuals.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace rgsde

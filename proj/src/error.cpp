#include "rgsde/error.hpp"

namespace rgsde {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::ConstraintViolation: return "constraint-violation";
    case ErrorKind::ObstacleViolation: return "obstacle-violation";
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::UnsupportedModulus: return "unsupported-modulus";
    case ErrorKind::IllPosedCase: return "ill-posed-case";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

void rethrow_with_context(const Error& e, const std::string& context) {
  Error out(e.kind(), context + ": " + e.what());
  out.with_residuals(e.residuals());
  throw out;
}

}  // namespace rgsde

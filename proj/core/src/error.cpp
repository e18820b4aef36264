#include "finspect/error.hpp"

namespace finspect {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDecode: return "decode error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kZeroMass: return "zero-mass error";
    case ErrorKind::kDegenerate: return "degenerate input";
    case ErrorKind::kSolver: return "solver error";
    case ErrorKind::kSpecification: return "specification error";
    case ErrorKind::kDiverged: return "training diverged";
    case ErrorKind::kData: return "data error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace finspect

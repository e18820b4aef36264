#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finspect {

enum class ErrorKind {
  kDecode,
  kParameter,
  kConfiguration,
  kShape,
  kZeroMass,
  kDegenerate,
  kSolver,
  kSpecification,
  kDiverged,
  kData,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception; kind() lets
// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace finspect

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace separ {

enum class ErrorKind {
  InvalidArgument,
  NotPositiveDefinite,
  SingularIterate,
  NoConvergence,
  DegenerateDimensions,
  InvalidMoments,
  QuadratureFailure,
  SampleTooSmall,
  ParseError,
  DimensionMismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated so the CLI can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace separ

#include "separ/error.hpp"

namespace separ {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::SingularIterate: return "SingularIterate";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateDimensions: return "DegenerateDimensions";
    case ErrorKind::InvalidMoments: return "InvalidMoments";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::SampleTooSmall: return "SampleTooSmall";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

}  // namespace separ

#include "manisync/error.hpp"

namespace manisync {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::NotOnManifold: return "point not on manifold";
    case ErrorCode::Degenerate: return "degenerate input";
    case ErrorCode::InsufficientCoverage: return "insufficient schedule coverage";
    case ErrorCode::RetractionFailure: return "retraction failure";
    case ErrorCode::MissingEstimators: return "missing estimators";
    case ErrorCode::MissingRelativePosition: return "missing relative position";
    case ErrorCode::Validation: return "validation error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace manisync

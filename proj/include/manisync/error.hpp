#pragma once

#include <stdexcept>
#include <string>

namespace manisync {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotOnManifold,
  Degenerate,
  InsufficientCoverage,
  RetractionFailure,
  MissingEstimators,
  MissingRelativePosition,
  Validation,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace manisync

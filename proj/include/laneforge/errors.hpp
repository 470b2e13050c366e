#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace laneforge {

enum class ErrorCode {
  EmptyLane,
  DegenerateLane,
  RankDeficient,
  InvalidConfig,
  InsufficientPoints,
  DegenerateNeighborhood,
  ShapeMismatch,
  EmptyVoxelSet,
  EmptySet,
  BadMagic,
  TruncatedFile,
  VersionUnsupported,
  SchemaViolation,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI, the pipeline report) can classify it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace laneforge

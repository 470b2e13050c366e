#include "laneforge/errors.hpp"

namespace laneforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLane: return "EmptyLane";
    case ErrorCode::DegenerateLane: return "DegenerateLane";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyVoxelSet: return "EmptyVoxelSet";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace laneforge

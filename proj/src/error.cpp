#include "pitchcam/error.hpp"

namespace pitchcam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kGimbalLock: return "GimbalLock";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kParallelToGround: return "ParallelToGround";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kInvalidDimensions: return "InvalidDimensions";
    case ErrorCode::kFullyBehind: return "FullyBehind";
    case ErrorCode::kInsufficientDiversity: return "InsufficientDiversity";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kInsufficientResiduals: return "InsufficientResiduals";
    case ErrorCode::kNoRoot: return "NoRoot";
    case ErrorCode::kDegenerateRays: return "DegenerateRays";
    case ErrorCode::kBarycenterAtCamera: return "BarycenterAtCamera";
    case ErrorCode::kTooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::kNoConsensus: return "NoConsensus";
    case ErrorCode::kOutOfOrderFrame: return "OutOfOrderFrame";
    case ErrorCode::kPitchOutOfView: return "PitchOutOfView";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace pitchcam

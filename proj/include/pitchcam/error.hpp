#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pitchcam {

enum class ErrorCode {
  kInvalidArgument,
  kGimbalLock,
  kNoConvergence,
  kParallelToGround,
  kBehindCamera,
  kInvalidDimensions,
  kFullyBehind,
  kInsufficientDiversity,
  kDiverged,
  kRankDeficient,
  kInsufficientResiduals,
  kNoRoot,
  kDegenerateRays,
  kBarycenterAtCamera,
  kTooFewCorrespondences,
  kNoConsensus,
  kOutOfOrderFrame,
  kPitchOutOfView,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable code; every failure the library
/// reports goes through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pitchcam

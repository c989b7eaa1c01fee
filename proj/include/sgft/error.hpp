#pragma once

#include <stdexcept>
#include <string>

namespace sgft {

enum class ErrorCode {
  kInvalidArgument,
  kInfiniteVariance,
  kDegenerateCovariance,
  kInvalidLink,
  kSingularBlock,
  kAsymmetricInput,
  kUnsupportedSize,
  kTruncatedStream,
  kOutOfBounds,
  kMalformedHeader,
  kTruncatedPayload,
  kDimensionMismatch,
  kIo,
};

const char* to_string(ErrorCode code);

// All library failures surface as sgft::Error; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sgft

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace egospeed {

enum class ErrorCode {
  kInvalidArgument,
  kCropOutOfBounds,
  kExtentMismatch,
  kTcRequiresFullFrame,
  kEmptySeries,
  kEmptySequence,
  kIoError,
  kBadMagic,
  kTruncatedFile,
  kBadPng,
  kWrongChannelCount,
  kBadHeader,
  kMissingFrameFile,
  kTooFewFields,
  kNonNumericField,
  kBadManifest,
  kCountMismatch,
  kUnknownId,
  kDegenerateFit,
  kNoOverlap,
  kNoValidPixels,
};

std::string_view to_string(ErrorCode code) noexcept;

// True for errors caused by the caller's configuration rather than the data.
bool is_configuration_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace egospeed

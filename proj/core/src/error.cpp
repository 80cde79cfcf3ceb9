#include "egospeed/error.hpp"

namespace egospeed {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kCropOutOfBounds: return "CropOutOfBounds";
    case ErrorCode::kExtentMismatch: return "ExtentMismatch";
    case ErrorCode::kTcRequiresFullFrame: return "TcRequiresFullFrame";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kBadPng: return "BadPng";
    case ErrorCode::kWrongChannelCount: return "WrongChannelCount";
    case ErrorCode::kBadHeader: return "BadHeader";
    case ErrorCode::kMissingFrameFile: return "MissingFrameFile";
    case ErrorCode::kTooFewFields: return "TooFewFields";
    case ErrorCode::kNonNumericField: return "NonNumericField";
    case ErrorCode::kBadManifest: return "BadManifest";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kDegenerateFit: return "DegenerateFit";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kNoValidPixels: return "NoValidPixels";
  }
  return "Unknown";
}

bool is_configuration_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kCropOutOfBounds:
    case ErrorCode::kTcRequiresFullFrame:
    case ErrorCode::kBadManifest:
    case ErrorCode::kUnknownId:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

}  // namespace egospeed

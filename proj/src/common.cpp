#include "seg3d/error.hpp"
#include "seg3d/image.hpp"

#include <algorithm>

namespace seg3d {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NonPositiveZ: return "NonPositiveZ";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonBinaryMask: return "NonBinaryMask";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NoValidDepth: return "NoValidDepth";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::OutOfFrustum: return "OutOfFrustum";
  }
  return "Unknown";
}

std::size_t popcount(const BinaryGrid& g) noexcept {
  return static_cast<std::size_t>(
      std::count_if(g.data.begin(), g.data.end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace seg3d

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seg3d {

enum class ErrorCode {
  InvalidArgument,
  InvalidDepth,
  OutOfBounds,
  NonPositiveZ,
  IoError,
  FormatError,
  SchemaError,
  DimensionMismatch,
  NonBinaryMask,
  DuplicateId,
  NoValidDepth,
  TooFewPoints,
  OutOfFrustum,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map them without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace seg3d

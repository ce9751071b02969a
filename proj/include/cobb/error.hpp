#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cobb {

enum class ErrorCode {
  Unreadable,
  MultiChannel,
  EmptyMask,
  TooSmall,
  CenterlineTooShort,
  FitFailed,
  NoAngleMeasurable,
  InvalidAngle,
  InvalidArgument,
  ParseError,
  MissingAlgorithmColumn,
  UndefinedCorrelation,
  UndefinedICC,
  UndefinedKappa,
  UndefinedDice,
  GeometryMismatch,
  OutOfFrame,
};

std::string_view to_string(ErrorCode code);

// Every failure carries a code and the pipeline stage that raised it
// ("mask_io", "centerline", "tilt_finder", "cobb", "stats", "render", "synth").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + std::string(to_string(code)) + ": " + message),
        code_(code),
        stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace cobb

#include "cobb/error.hpp"

namespace cobb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unreadable: return "Unreadable";
    case ErrorCode::MultiChannel: return "MultiChannel";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::CenterlineTooShort: return "CenterlineTooShort";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::NoAngleMeasurable: return "NoAngleMeasurable";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingAlgorithmColumn: return "MissingAlgorithmColumn";
    case ErrorCode::UndefinedCorrelation: return "UndefinedCorrelation";
    case ErrorCode::UndefinedICC: return "UndefinedICC";
    case ErrorCode::UndefinedKappa: return "UndefinedKappa";
    case ErrorCode::UndefinedDice: return "UndefinedDice";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::OutOfFrame: return "OutOfFrame";
  }
  return "Unknown";
}

}  // namespace cobb

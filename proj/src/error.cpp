#include "camcond/error.hpp"

namespace camcond {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::NoBoundaryData: return "NoBoundaryData";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorCode::NonPositiveResult: return "NonPositiveResult";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::AllUncovered: return "AllUncovered";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidSteps: return "InvalidSteps";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::DegenerateMatch: return "DegenerateMatch";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::NonFloatPayload: return "NonFloatPayload";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace camcond

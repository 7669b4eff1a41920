#include "physarum/error.hpp"

namespace physarum {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonPositiveCost: return "NonPositiveCost";
    case ErrorCode::ExactTooLarge: return "ExactTooLarge";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonPositiveState: return "NonPositiveState";
    case ErrorCode::NotInKernel: return "NotInKernel";
    case ErrorCode::BadEps: return "BadEps";
    case ErrorCode::BadStep: return "BadStep";
    case ErrorCode::NoFeasibleInteriorStart: return "NoFeasibleInteriorStart";
    case ErrorCode::PositivityLost: return "PositivityLost";
    case ErrorCode::MissingVerifyData: return "MissingVerifyData";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::InsufficientTrace: return "InsufficientTrace";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NewtonStalled: return "NewtonStalled";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoInteriorPoint: return "NoInteriorPoint";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
  }
  return "Unknown";
}

}  // namespace physarum

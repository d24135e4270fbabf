#include "swdisp/error.hpp"

namespace swdisp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::ZeroMarginal: return "ZeroMarginal";
    case ErrorCode::WeightSumNotOne: return "WeightSumNotOne";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMixture: return "EmptyMixture";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateSigma: return "DegenerateSigma";
    case ErrorCode::DegenerateComponentSigma: return "DegenerateComponentSigma";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::UnsupportedCase: return "UnsupportedCase";
    case ErrorCode::SignConstraintViolated: return "SignConstraintViolated";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::EmptyBinPair: return "EmptyBinPair";
    case ErrorCode::InvalidTrials: return "InvalidTrials";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace swdisp

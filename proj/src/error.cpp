#include "jase/error.hpp"

namespace jase {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Dimension: return "E_DIMENSION";
    case ErrorCode::InvalidValue: return "E_INVALID_VALUE";
    case ErrorCode::SingleClass: return "E_SINGLE_CLASS";
    case ErrorCode::RankDeficient: return "E_RANK_DEFICIENT";
    case ErrorCode::Separation: return "E_SEPARATION";
    case ErrorCode::NotConverged: return "E_NOT_CONVERGED";
    case ErrorCode::DegenerateWeights: return "E_DEGENERATE_WEIGHTS";
    case ErrorCode::DegenerateSpectrum: return "E_DEGENERATE_SPECTRUM";
    case ErrorCode::Insufficient: return "E_INSUFFICIENT";
    case ErrorCode::Config: return "E_CONFIG";
  }
  return "E_UNKNOWN";
}

}  // namespace jase

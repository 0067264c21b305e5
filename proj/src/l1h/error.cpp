#include "l1h/error.hpp"

namespace l1h {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateSupport: return "DegenerateSupport";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::SingularCrossGram: return "SingularCrossGram";
    case ErrorCode::StaleWarmStart: return "StaleWarmStart";
    case ErrorCode::NonmonotoneEpsilon: return "NonmonotoneEpsilon";
    case ErrorCode::SingularBootstrap: return "SingularBootstrap";
    case ErrorCode::SingularSubmatrix: return "SingularSubmatrix";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::ConstraintAlreadyViolated: return "ConstraintAlreadyViolated";
    case ErrorCode::NoCertifiedSolution: return "NoCertifiedSolution";
  }
  return "UnknownError";
}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(error_code_name(code)) + ": " + message);
}

}  // namespace l1h

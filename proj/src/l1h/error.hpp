#pragma once

#include <stdexcept>
#include <string>

namespace l1h {

// Failure categories surfaced by the library. The C API maps these 1:1 onto
// its integer error codes, so the order here is part of the ABI.
enum class ErrorCode {
  Config = 1,
  Io,
  InvalidArgument,
  NotPositiveDefinite,
  DegenerateSupport,
  IterationLimit,
  SingularCrossGram,
  StaleWarmStart,
  NonmonotoneEpsilon,
  SingularBootstrap,
  SingularSubmatrix,
  SingularGram,
  RankDeficient,
  BadLength,
  ConstraintAlreadyViolated,
  NoCertifiedSolution,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace l1h

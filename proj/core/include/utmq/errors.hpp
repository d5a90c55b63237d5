#pragma once

#include <stdexcept>
#include <string>

namespace utmq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// argument outside an operation's stated domain
struct DomainError : Error {
  using Error::Error;
};

// a quadrature or iteration failed to reach its tolerance
struct NonConvergent : Error {
  using Error::Error;
};

// branch evaluation on a cut without a side hint
struct CutError : Error {
  using Error::Error;
};

// integrand produced a NaN; message carries the offending point
struct NaNEncountered : Error {
  using Error::Error;
};

// banded linear solve broke down
struct SingularSystem : Error {
  using Error::Error;
};

// least-squares fit residual too large to trust
struct FitUnstable : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace utmq

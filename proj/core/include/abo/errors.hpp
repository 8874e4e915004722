#pragma once

#include <stdexcept>
#include <string>

namespace abo {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inputs of incompatible dimension (point vs matrix, vector lengths).
struct DimensionError : Error {
  using Error::Error;
};

/// A model parameter outside its admissible domain, or an invalid fixture.
struct ParameterDomainError : Error {
  using Error::Error;
};

/// Cholesky factorization failed even after maximum jitter escalation.
struct IllConditionedError : Error {
  using Error::Error;
};

/// Degenerate data: constant targets, zero output variance, too few rows.
struct DegenerateDataError : Error {
  using Error::Error;
};

/// Every surrogate trial in a model search failed.
struct SurrogateUnavailableError : Error {
  using Error::Error;
};

/// A ratio-based statistic was requested on a curve that crosses zero.
struct IllDefinedRatioError : Error {
  using Error::Error;
};

/// Objective evaluation failed (non-finite value, dead child process, timeout).
struct EvaluationError : Error {
  using Error::Error;
};

/// Configuration file problem; the message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace abo

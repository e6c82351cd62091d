#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nilflow {

using Complex = std::complex<double>;

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  Resonance,
  NonzeroAverage,
  NotACocycle,
  NonInvertible,
  NoConvergence,
  EmptyCorpus,
  ThresholdExceeded,
  DegenerateAlpha,
  EnumerationCap,
  EigenFailure,
  ParseError,
  MissingKey,
  TypeError,
  UnknownKey,
  Io,
};

/// Stable identifier used in machine-readable CLI output.
const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the first-cohomology solver when a cochain has a nonzero
/// trivial-representation component. Carries the constant obstruction.
class NonzeroAverageError : public Error {
 public:
  NonzeroAverageError(Complex f_triv, Complex g_triv);

  Complex f_triv() const noexcept { return f_triv_; }
  Complex g_triv() const noexcept { return g_triv_; }

 private:
  Complex f_triv_;
  Complex g_triv_;
};

/// Parse failure with a 1-based line number (0 when not line-oriented).
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int line, const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace nilflow

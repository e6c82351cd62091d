#include "nilflow/errors.hpp"

#include <sstream>

namespace nilflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Resonance: return "Resonance";
    case ErrorCode::NonzeroAverage: return "NonzeroAverage";
    case ErrorCode::NotACocycle: return "NotACocycle";
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ThresholdExceeded: return "ThresholdExceeded";
    case ErrorCode::DegenerateAlpha: return "DegenerateAlpha";
    case ErrorCode::EnumerationCap: return "EnumerationCap";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

namespace {
std::string obstruction_message(Complex f, Complex g) {
  std::ostringstream os;
  os << "cochain has nonzero average: obstruction (" << f << ", " << g << ")";
  return os.str();
}
}  // namespace

NonzeroAverageError::NonzeroAverageError(Complex f_triv, Complex g_triv)
    : Error(ErrorCode::NonzeroAverage, obstruction_message(f_triv, g_triv)),
      f_triv_(f_triv),
      g_triv_(g_triv) {}

ParseError::ParseError(ErrorCode code, int line, const std::string& message)
    : Error(code, line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

}  // namespace nilflow

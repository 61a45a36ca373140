#include "gasadapt/errors.hpp"

namespace gasadapt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SonicFlow: return "SonicFlow";
    case ErrorKind::NonPositivePressure: return "NonPositivePressure";
    case ErrorKind::DrainedPipe: return "DrainedPipe";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::IncompatibleGrids: return "IncompatibleGrids";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::EmptyNetwork: return "EmptyNetwork";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace gasadapt

#pragma once

#include <stdexcept>
#include <string>

namespace gasadapt {

enum class ErrorKind {
  SonicFlow,
  NonPositivePressure,
  DrainedPipe,
  NewtonDivergence,
  IncompatibleGrids,
  Unsupported,
  EmptyNetwork,
  InvalidGrid,
  InvalidArgument,
  ParseError,
  ValidationError,
  Infeasible,
  IterationLimit,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for everything thrown by the library. The kind allows
/// callers (the CLI in particular) to map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(K, what) {}
};

using SonicFlowError = TypedError<ErrorKind::SonicFlow>;
using NonPositivePressureError = TypedError<ErrorKind::NonPositivePressure>;
using DrainedPipeError = TypedError<ErrorKind::DrainedPipe>;
using NewtonDivergenceError = TypedError<ErrorKind::NewtonDivergence>;
using IncompatibleGridsError = TypedError<ErrorKind::IncompatibleGrids>;
using UnsupportedError = TypedError<ErrorKind::Unsupported>;
using EmptyNetworkError = TypedError<ErrorKind::EmptyNetwork>;
using InvalidGridError = TypedError<ErrorKind::InvalidGrid>;
using InvalidArgumentError = TypedError<ErrorKind::InvalidArgument>;
using ParseError = TypedError<ErrorKind::ParseError>;
using ValidationError = TypedError<ErrorKind::ValidationError>;
using InfeasibleError = TypedError<ErrorKind::Infeasible>;
using IterationLimitError = TypedError<ErrorKind::IterationLimit>;
using IoError = TypedError<ErrorKind::Io>;

}  // namespace gasadapt

#pragma once

#include <stdexcept>

namespace permalign {

/// Base class for every failure this library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with arguments violating its contract
/// (shape mismatch, non-finite input, index out of range, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is invalid (bad sampler spec, unknown key,
/// unsupported enum value, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An instance is larger than an operation supports.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be positive semidefinite has a clearly negative
/// eigenvalue.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

/// The input is degenerate for the requested quantity (e.g. a zero matrix
/// where a trace ratio is undefined).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite parameter; the message names the step.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or ended prematurely.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A binary or textual payload does not match the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree (e.g. image and label counts) do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Checkpoint loading reports one of four distinct failures.

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class VersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class TruncatedError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class ShapeError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace permalign

#pragma once

#include <stdexcept>
#include <string>

namespace bpinn {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter vector does not fit the architecture, or the architecture itself is malformed.
class ArchitectureError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared while propagating through the network.
class NumericalOverflowError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to a numerical routine (empty sample counts, nonpositive fit data, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Incomplete or inconsistent experiment / loss configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace bpinn

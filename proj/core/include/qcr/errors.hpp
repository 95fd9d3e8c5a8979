#pragma once

#include <stdexcept>
#include <string>

namespace qcr {

// Base class for every exception thrown by the library. Tools map subclasses
// onto process exit codes, so the hierarchy is part of the public contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid device parameters, malformed configuration files, out-of-range
// CLI options. Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: an algorithm could not reach its accuracy target or was
// handed inputs outside its supported domain. Exit code 3.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature exhausted its panel budget before meeting the requested
// tolerance. Carries the relative error that was actually achieved.
class QuadratureError : public NumericsError {
 public:
  QuadratureError(const std::string& what, double achieved_rel_error)
      : NumericsError(what), achieved_rel_error_(achieved_rel_error) {}

  double achieved_rel_error() const noexcept { return achieved_rel_error_; }

 private:
  double achieved_rel_error_;
};

// Evaluation outside a model's supported domain (e.g. interpolation beyond
// the tabulated bias range). A NumericsError, exit code 3.
class RangeError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

// File I/O and serialization failures. Exit code 3 unless the file is a
// configuration file (then the caller wraps it as ConfigError).
class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedCsvError : public IoError {
 public:
  using IoError::IoError;
};

class MissingSidecarError : public IoError {
 public:
  using IoError::IoError;
};

class LengthMismatchError : public IoError {
 public:
  using IoError::IoError;
};

class NonMonotonicTimeError : public IoError {
 public:
  using IoError::IoError;
};

// Estimation failures that are not I/O: singular design matrices, empty
// windows, degenerate weights. Exit code 3.
class FitError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

// The decay-rate extraction could not find a statistically significant
// single-exponential segment in the pulse-width sweep. Exit code 4.
class InsufficientLinearRegionError : public Error {
 public:
  using Error::Error;
};

// Effective-temperature computation is undefined because emission exceeds
// absorption (no cooling); reported per point, not as a hard failure, except
// where a caller explicitly requires cooling.
class NoCoolingError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

}  // namespace qcr

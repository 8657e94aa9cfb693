#pragma once

#include <stdexcept>
#include <string>

namespace tiltrotor {

/// Numerical failure of the plant or allocation (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euler kinematics evaluated too close to |theta| = pi/2.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Rotor mixer is not invertible at the requested tilt.
class SingularMixerError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Tilt schedule parameters cannot reach the far endpoint monotonically.
class InvalidScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent scenario configuration (exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File read/write failure, message carries the path (exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tiltrotor

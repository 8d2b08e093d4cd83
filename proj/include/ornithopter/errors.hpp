#pragma once

#include <stdexcept>
#include <string>

namespace ornithopter {

// Base class for every error raised by the library. Each subclass names one
// failure mode so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry / algebra
class ZeroAxis : public Error { using Error::Error; };
class ZeroVector : public Error { using Error::Error; };
class OutOfSpan : public Error { using Error::Error; };
class GammaOutOfRange : public Error { using Error::Error; };
class RankDeficient : public Error { using Error::Error; };

// Aerodynamics
class StagnantChord : public Error { using Error::Error; };

// Dynamics; these map to the "numerical failure" exit code.
class NumericalError : public Error { using Error::Error; };
class SingularMass : public NumericalError { using NumericalError::NumericalError; };
class SingularReducedMass : public NumericalError { using NumericalError::NumericalError; };

class NonFiniteState : public NumericalError {
 public:
  NonFiniteState(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Configuration; these map to the "config error" exit code.
class ConfigError : public Error { using Error::Error; };
class ParseError : public ConfigError { using ConfigError::ConfigError; };
class SchemaError : public ConfigError { using ConfigError::ConfigError; };
class BoundsError : public ConfigError { using ConfigError::ConfigError; };

}  // namespace ornithopter

#pragma once

#include <stdexcept>
#include <string>

namespace persistlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or configuration violates a documented invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: the computation was well posed but did not succeed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureNonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NegativeEigenvalue : public NumericalError {
 public:
  NegativeEigenvalue(double min_eig, double max_eig)
      : NumericalError("circulant embedding has negative eigenvalue: min=" + std::to_string(min_eig) +
                       " max=" + std::to_string(max_eig)),
        min_eigenvalue(min_eig),
        max_eigenvalue(max_eig) {}
  double min_eigenvalue;
  double max_eigenvalue;
};

class NotPSD : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotInvertible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionTooLarge : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class EmptyRange : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InsufficientData : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class BumpSupportViolation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class PositivityUnreachable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GrowthMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace persistlab

#pragma once

#include <stdexcept>
#include <string>

namespace nhmf {

// Root of the library's exception hierarchy. Every error raised by the
// numerical modules derives from this so callers can map it to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

// c-norm a^2 + b^2 of an orbital collapsed; the NH expectation value is
// undefined there.
class GaugeSingularError : public Error {
 public:
  GaugeSingularError(const std::string& what, double c_norm_magnitude)
      : Error(what), magnitude_(c_norm_magnitude) {}
  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), residual_(last_residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class PairingError : public Error {
 public:
  using Error::Error;
};

class CensusError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhmf

#pragma once

#include <stdexcept>
#include <string>

namespace hso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is (numerically) singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A vector field produced a non-finite value during integration.
class IntegrationFault : public Error {
 public:
  IntegrationFault(double t, const std::string& what)
      : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Riccati integration did not settle within the allowed horizon.
class SynthesisFailure : public Error {
 public:
  SynthesisFailure(double last_residual, const std::string& what)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

/// R-hat assembled from the current weights cannot be inverted.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace hso

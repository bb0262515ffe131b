#pragma once

#include <stdexcept>
#include <string>

namespace olab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs does not hold (dimension mismatch, bad range, unsupported body).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Kernel evaluated at one of its singular points.
class SingularInputError : public DomainError {
public:
  using DomainError::DomainError;
};

/// An iterative or adaptive procedure stopped before reaching its tolerance.
class NumericalError : public Error {
public:
  NumericalError(const std::string& what, double estimate, double gap)
      : Error(what), estimate_(estimate), gap_(gap) {}

  double estimate() const noexcept { return estimate_; }
  double gap() const noexcept { return gap_; }

private:
  double estimate_;
  double gap_;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

[[noreturn]] void fail_domain(const std::string& what);

}  // namespace olab

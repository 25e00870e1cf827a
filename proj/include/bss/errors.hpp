#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace bss {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or non-finite parameter (source specs, options, configs).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the data was violated (not centered, not whitened, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Covariance eigenvalue at or below the whitening floor.
class SingularCovarianceError : public Error {
 public:
  SingularCovarianceError(std::size_t component, double eigenvalue,
                          double floor)
      : Error(message(component, eigenvalue, floor)), component_(component) {}

  std::size_t component() const noexcept { return component_; }

 private:
  static std::string message(std::size_t component, double eigenvalue, double floor) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "singular covariance: component %zu has eigenvalue %.3g <= floor %.3g",
                  component, eigenvalue, floor);
    return buf;
  }

  std::size_t component_;
};

/// Gram-Schmidt left (numerically) nothing of the candidate vector.
class DegenerateDeflationError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search requested on a problem that is too large.
class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace bss

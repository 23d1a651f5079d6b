#pragma once

#include <stdexcept>
#include <string>

namespace needlet {

/// Raised for bad user input: malformed files, out-of-range arguments,
/// vectors that are not (close to) unit length.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an argument lies outside the mathematical domain of an
/// operation (negative window argument, |s| > 1, d < 3, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical construction fails or a certified property does
/// not hold (Newton non-convergence, window floor <= 0, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace needlet

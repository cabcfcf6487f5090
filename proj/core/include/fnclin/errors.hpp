#pragma once

#include <stdexcept>
#include <string>

namespace fnclin {

/// Bad user input: invalid parameters, malformed files, precondition
/// violations. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure at run time (integration blow-up, solver breakdown,
/// inapplicable closed form). The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fnclin

#pragma once

#include <stdexcept>
#include <string>

namespace pibreak {

/// Malformed quantum numbers, incompatible sector structure, bad parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values, step-size collapse, eigen-solver failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration the implementation deliberately does not support.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A fit or closed form that does not apply to the given input.
class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pibreak

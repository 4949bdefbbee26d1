#pragma once

#include <stdexcept>
#include <string>

namespace fepp {

// A precondition of an operation was violated (bad dimensions, repeated
// targets, invalid weights, non-diagonal gate, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scalar argument fell outside the domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A requested Hilbert-space dimension exceeds the configured cap.
class SizingError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The reflection-coefficient denominator vanished for the given parameters.
class SingularParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fepp

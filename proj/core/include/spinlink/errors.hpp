#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace spinlink {

// Wrong shape, index out of range, duplicate identifiers.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input is well-shaped but outside the operation's domain (unphysical state,
// non-positive rate, negative time).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite input or a solve that failed its accuracy bound.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Drift matrix is not Hurwitz; carries the eigenvalue with the largest real part.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, std::complex<double> eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}

  std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::complex<double> eigenvalue_;
};

}  // namespace spinlink

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dint {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, dimensions or parameters do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An atom oracle failed (non-convergence, non-finite output, -inf value).
class NumericalError : public Error {
 public:
  NumericalError(std::size_t atom, const std::string& what)
      : Error("atom " + std::to_string(atom) + ": " + what), atom_(atom) {}

  std::size_t atom() const noexcept { return atom_; }

 private:
  std::size_t atom_;
};

/// An optional oracle (forward map, conjugate, support, ...) is missing.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A limiting procedure diverged, i.e. the input is likely outside a domain.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace dint

#pragma once

#include <stdexcept>
#include <string>

namespace thick {

// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands live in spaces with different thick points.
class ThickPointMismatch : public Error {
 public:
  using Error::Error;
};

// An expansion coefficient was requested beyond the reliable window.
class InsufficientOrder : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (bad radius, ill-conditioned fit, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Internal consistency failure, e.g. a pole hit in a branch that excludes it.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace thick

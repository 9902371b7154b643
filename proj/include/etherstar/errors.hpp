#pragma once

#include <stdexcept>
#include <string>

namespace etherstar {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: point off the manifold, malformed spec string, bad config.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to deliver a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegratorDiverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The fixed-point map s_z∘s_x∘s_y has a degenerate linearization.
class FocalTriple : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The chord map s_x∘γ^t has a degenerate linearization.
class FocalTime : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MembraneError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace etherstar

#ifndef OPENSET_ERRORS_HPP_
#define OPENSET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace openset {

// Base of every error raised by the library. Subclasses carry the
// failing precondition in what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input problems: malformed data, wrong shapes, bad arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical degeneracy: matrices that should be positive definite are not.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class ShapeMismatch : public InputError {
 public:
  using InputError::InputError;
};

class IndexOutOfRange : public InputError {
 public:
  using InputError::InputError;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyDimension : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class NonFiniteValue : public InputError {
 public:
  using InputError::InputError;
};

class UnknownLabel : public InputError {
 public:
  using InputError::InputError;
};

class AllZeroPrior : public InputError {
 public:
  using InputError::InputError;
};

class ImproperPrior : public InputError {
 public:
  using InputError::InputError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// B* (or the evidence scatter matrix) failed its Cholesky factorization.
class DegenerateScatter : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// a* + 1 - N <= 0: the predictive T density has no valid normalizer.
class InsufficientDof : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoFiniteValue : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace openset

#endif  // OPENSET_ERRORS_HPP_

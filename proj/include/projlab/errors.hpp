#pragma once

#include <stdexcept>
#include <string>

namespace projlab {

/// Base class for all projlab errors. The CLI maps subclasses onto its
/// exit-code contract (2 = invalid input, 3 = degenerate start, 1 = failure).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class NumericalFailure : public Error {
public:
  using Error::Error;
};

/// The supplied vector does not satisfy its eigen-residual precondition.
class NotAnEigenvector : public Error {
public:
  using Error::Error;
};

/// cos(theta_F) is zero within tolerance; the eigenvalue correspondence does not apply.
class OrthogonalSubspaces : public Error {
public:
  using Error::Error;
};

class PreconditionViolated : public Error {
public:
  using Error::Error;
};

/// The start carries no component outside the fixed-point eigenspaces.
class DegenerateStart : public Error {
public:
  using Error::Error;
};

/// Requested a mu_minus counterexample start where none exists (cos(theta_F) <= 1/2).
class NoSuchStart : public Error {
public:
  using Error::Error;
};

class InsufficientData : public Error {
public:
  using Error::Error;
};

class NotApplicable : public Error {
public:
  using Error::Error;
};

}  // namespace projlab

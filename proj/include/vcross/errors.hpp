#pragma once

#include <stdexcept>
#include <string>

namespace vcross {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Grid too small to hold the contour shells.
struct SizingError : Error {
  using Error::Error;
};

// (beta, omega) outside the existence domain of the amplitude system,
// or beta = 1 requested away from the omega = 1 line.
struct ExistenceDomainError : Error {
  using Error::Error;
};

// Shape/component mismatch between a field and a spec.
struct ShapeError : Error {
  using Error::Error;
};

// Singular reduced system (e.g. the second-order vector correction at beta = 1).
struct SingularSystemError : Error {
  using Error::Error;
};

// Newton continuation failed; carries the last epsilon that converged.
struct ContinuationError : Error {
  double last_good_eps;
  ContinuationError(const std::string& msg, double eps)
      : Error(msg), last_good_eps(eps) {}
};

// Jacobian rank deficiency beyond the expected gauge kernels.
struct SingularityError : Error {
  using Error::Error;
};

// Operator assembly requested on a state whose residual is above tolerance.
struct StaleStateError : Error {
  using Error::Error;
};

// Dense eigensolver / linear solver failure.
struct NumericalError : Error {
  using Error::Error;
};

// Time integration violated the conserved-quantity budget.
struct StepSizeError : Error {
  using Error::Error;
};

// Growth-rate validation called on a spectrally stable state.
struct PreconditionError : Error {
  using Error::Error;
};

// Bad run configuration (unknown figure regime, missing artifacts, ...).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace vcross

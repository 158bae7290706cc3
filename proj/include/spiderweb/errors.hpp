#pragma once

#include <stdexcept>
#include <string>

namespace spiderweb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad problem parameters or radii outside the ordered cone.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Two rings (or a ring and a probe body) at the same radius.
class CollisionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SolverError : public Error {
 public:
  enum class Kind { NewtonDiverged, SingularJacobian, ContinuationStalled, OrderingViolated, BracketFailed };

  SolverError(Kind kind, const std::string& what, int ring = -1, double last_mass = 0.0)
      : Error(what), kind_(kind), ring_(ring), last_mass_(last_mass) {}

  Kind kind() const { return kind_; }
  /// Zero-based ring being constructed when the failure happened, or -1.
  int ring() const { return ring_; }
  /// Last mass value reached by a stalled continuation.
  double last_mass() const { return last_mass_; }

 private:
  Kind kind_;
  int ring_;
  double last_mass_;
};

const char* to_string(SolverError::Kind kind);

class CertificationFailed : public Error {
 public:
  enum class Reason { Z0TooLarge, NoNegativeValue, BallLeavesCone, EvaluationFailed };

  CertificationFailed(Reason reason, const std::string& what) : Error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

const char* to_string(CertificationFailed::Reason reason);

}  // namespace spiderweb

#include "spiderweb/params.hpp"

#include <cmath>
#include <string>

namespace spiderweb {

const char* to_string(SolverError::Kind kind) {
  switch (kind) {
    case SolverError::Kind::NewtonDiverged: return "NewtonDiverged";
    case SolverError::Kind::SingularJacobian: return "SingularJacobian";
    case SolverError::Kind::ContinuationStalled: return "ContinuationStalled";
    case SolverError::Kind::OrderingViolated: return "OrderingViolated";
    case SolverError::Kind::BracketFailed: return "BracketFailed";
  }
  return "Unknown";
}

const char* to_string(CertificationFailed::Reason reason) {
  switch (reason) {
    case CertificationFailed::Reason::Z0TooLarge: return "Z0TooLarge";
    case CertificationFailed::Reason::NoNegativeValue: return "NoNegativeValue";
    case CertificationFailed::Reason::BallLeavesCone: return "BallLeavesCone";
    case CertificationFailed::Reason::EvaluationFailed: return "EvaluationFailed";
  }
  return "Unknown";
}

void SpiderwebParams::validate() const {
  if (n < 1) throw ValidationError("ring count n must be at least 1");
  if (ell < 2) throw ValidationError("spoke count ell must be at least 2");
  if (!std::isfinite(m0) || m0 < 0.0) throw ValidationError("central mass m0 must be finite and nonnegative");
  if (!std::isfinite(lambda) || lambda >= 0.0) throw ValidationError("lambda must be finite and strictly negative");
  if (masses.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("expected " + std::to_string(n) + " ring masses, got " + std::to_string(masses.size()));
  }
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double m = masses[i];
    const bool ok = std::isfinite(m) && (allow_massless_rings ? m >= 0.0 : m > 0.0);
    if (!ok) throw ValidationError("ring " + std::to_string(i + 1) + " has nonpositive or non-finite mass");
  }
}

bool in_cone(const Eigen::VectorXd& radii) {
  if (radii.size() == 0 || !radii.allFinite() || !(radii[0] > 0.0)) return false;
  for (Eigen::Index i = 0; i + 1 < radii.size(); ++i) {
    if (!(radii[i] < radii[i + 1])) return false;
  }
  return true;
}

void require_in_cone(const Eigen::VectorXd& radii) {
  if (radii.size() == 0) throw ValidationError("empty radii vector");
  if (!radii.allFinite()) throw ValidationError("non-finite radius");
  if (!(radii[0] > 0.0)) throw ValidationError("innermost radius must be positive");
  for (Eigen::Index i = 0; i + 1 < radii.size(); ++i) {
    if (radii[i] == radii[i + 1]) throw CollisionError("rings " + std::to_string(i + 1) + " and " + std::to_string(i + 2) + " coincide");
    if (radii[i] > radii[i + 1]) throw ValidationError("radii are not strictly increasing");
  }
}

}  // namespace spiderweb

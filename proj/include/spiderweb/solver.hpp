#pragma once

#include <Eigen/Core>

#include <vector>

#include "spiderweb/params.hpp"

namespace spiderweb {

struct ContinuationSettings {
  /// Initial mass increment; 0 means target_mass / 8.
  double mass_step_init = 0.0;
  double step_shrink = 0.5;
  double step_grow = 2.0;
  /// Newton stops once ||f||_inf <= newton_tol.
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  /// Width at which the insertion bisection stops; 0 means 1e-13 * r_n.
  double bisect_tol = 0.0;
  /// Attempted increments (accepted or not) per continuation before it stalls.
  int max_mass_steps = 100000;

  void validate() const;
};

/// Gap for a new massless ring: index i lies between rings i and i+1
/// (one-based), 0 is (0, r_1) and n is (r_n, infinity).
struct InsertionGap {
  int index = 0;
};

struct NewtonTrace {
  int iterations = 0;
  /// ||f||_inf at the start and after every accepted step.
  std::vector<double> residual_norms;
};

/// Result of placing a massless ring: the enlarged problem (mass 0 at
/// position `ring`) and its sorted radii.
struct Insertion {
  SpiderwebParams params;
  Eigen::VectorXd radii;
  Eigen::Index ring = 0;
};

/// Closed form r_1 = ((m_1 zeta / 2^(3/2) + m0) / -lambda)^(1/3).
Configuration solve_single_ring(const SpiderwebParams& params);

/// Damped Newton: r <- r - alpha Df(r)^{-1} f(r), alpha halved down to 2^-10
/// until the sup norm of f decreases and the radii stay ordered.
Configuration newton_solve(const SpiderwebParams& params, const Eigen::VectorXd& initial_radii,
                           const ContinuationSettings& settings = {}, NewtonTrace* trace = nullptr);

/// Bisection root of lambda_probe(rho) = lambda in the requested gap.
double insertion_radius(const Configuration& config, InsertionGap gap, const ContinuationSettings& settings = {});

Insertion insert_zero_mass_ring(const Configuration& config, InsertionGap gap, const ContinuationSettings& settings = {});

/// Raises the mass of ring `ring` from its current value (normally 0) to
/// target_mass, correcting with Newton after every increment.
Configuration continue_mass(const SpiderwebParams& params, const Eigen::VectorXd& radii, Eigen::Index ring,
                            double target_mass, const ContinuationSettings& settings = {});

/// Closed-form first ring, then for each further ring: insert it massless
/// in the outermost gap and continue its mass up to the target.
Configuration build_configuration(const SpiderwebParams& params, const ContinuationSettings& settings = {});

}  // namespace spiderweb

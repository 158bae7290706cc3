#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "spiderweb/interval.hpp"
#include "spiderweb/params.hpp"

namespace spiderweb {

/// Proof that a unique zero of f lies in the sup-norm ball B(center, rho0).
struct Certificate {
  Eigen::VectorXd center;
  double rho_star = 0.0;
  double Y0 = 0.0;
  double Z0 = 0.0;
  double Z2 = 0.0;
  double rho0 = 0.0;
  /// Rigorous upper bound of Z2 rho0^2 - (1 - Z0) rho0 + Y0; negative.
  double p_at_rho0 = 0.0;
  /// rho_star values tried before this one succeeded.
  int retries = 0;
};

struct RadiiPolyResult {
  double rho0 = 0.0;
  double p_upper = 0.0;
};

/// Upper bound of ||A f(center)||_inf.
double bound_Y0(const Eigen::MatrixXd& A, const Eigen::VectorXd& center, const SpiderwebParams& params);

/// Upper bound of ||I - A Df(center)||_inf. Returned as is, even when >= 1.
double bound_Z0(const Eigen::MatrixXd& A, const Eigen::VectorXd& center, const SpiderwebParams& params);

/// Upper bound, uniform over the box center +- rho_star, of
/// max_i sum_{k,m} |sum_j A_ij d^2 f_j / dr_k dr_m|.
/// Throws CertificationFailed(BallLeavesCone) if the box can leave the cone.
double bound_Z2(const Eigen::MatrixXd& A, const Eigen::VectorXd& center, const SpiderwebParams& params,
                double rho_star);

/// True when every point of the box center +- rho stays strictly ordered and positive.
bool ball_in_cone(const Eigen::VectorXd& center, double rho);

/// Smallest practical rho0 with p(rho0) < 0 proven in interval arithmetic and rho0 <= rho_star.
RadiiPolyResult radii_poly_check(double Y0, double Z0, double Z2, double rho_star);

/// 1e-4 min(r_1, min_i (r_{i+1} - r_i)).
double default_rho_star(const Eigen::VectorXd& radii);

/// Full certification with the rho_star retry ladder (halve up to 4 times,
/// then double up to 4 times from the initial value).
Certificate certify(const Configuration& config, std::optional<double> rho_star_init = std::nullopt);

struct HCheckReport {
  int ell = 0;
  int grid_points = 0;
  double deriv_bound = 0.0;
  double lower_bound = 0.0;
  bool verified = false;
  /// ell <= 4 only: outcome of the closed-form positivity argument.
  std::optional<bool> closed_form_verified;
  /// Set when not verified: a point with h_ell rigorously negative.
  std::optional<double> witness_x;
  std::optional<Interval> witness_value;
};

/// Grid proof that h_ell > 0 on [0, 1]. grid_points = 0 picks p from M and m.
/// Never throws for ell >= 2; failure is reported through `verified`.
HCheckReport h_ell_check(int ell, int grid_points = 0);

/// Proves h_ell(x) > bound for all x in [0, 1] by adaptive bisection with the
/// mean-value form. Returns false if the depth budget runs out.
bool h_ell_exceeds(int ell, double bound, int max_depth = 30);

/// Rigorous lower bound of min_{[0,1]} h_ell from `pieces` mean-value enclosures.
double h_ell_lower_bound(int ell, int pieces = 4096);

/// Rigorous enclosure of zeta_ell.
Interval zeta_enclosure(int ell);

/// Closed forms of h_ell for ell = 2, 3, 4.
template <class Scalar>
Scalar h_ell_closed_form(int ell, const Scalar& x);

/// Strict row diagonal dominance of Df(radii), checked in interval arithmetic.
bool dominance_check(const SpiderwebParams& params, const Eigen::VectorXd& radii);

}  // namespace spiderweb

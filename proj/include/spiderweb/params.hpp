#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <vector>

#include "spiderweb/errors.hpp"

namespace spiderweb {

/// One spiderweb problem: n rings of ell equal bodies each, an optional
/// central body, and the common proportionality constant lambda < 0.
struct SpiderwebParams {
  int n = 1;
  int ell = 2;
  double m0 = 0.0;
  /// Mass of each body on ring i, innermost first.
  std::vector<double> masses{1.0};
  double lambda = -1.0;
  /// Admit rings of zero mass (the restricted problem). Off for user input.
  bool allow_massless_rings = false;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;
};

struct Configuration {
  SpiderwebParams params;
  Eigen::VectorXd radii;
  double residual_norm = 0.0;
  /// max_i sum_j |df_i/dr_j| ulp(r_j): the smallest residual double radii
  /// can be expected to reach. Newton accepts stagnation only below it.
  double residual_floor = 0.0;

  /// residual_norm <= max(tol, residual_floor)
  bool converged(double tol) const { return residual_norm <= std::max(tol, residual_floor); }
};

/// 0 < r_1 < ... < r_n, all finite.
bool in_cone(const Eigen::VectorXd& radii);

/// Throws CollisionError on repeated radii and ValidationError on any other
/// departure from the cone.
void require_in_cone(const Eigen::VectorXd& radii);

}  // namespace spiderweb

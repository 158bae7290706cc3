#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "spiderweb/params.hpp"

namespace testing_support {

using spiderweb::SpiderwebParams;

struct Instance {
  SpiderwebParams params;
  Eigen::VectorXd radii;
};

/// Arbitrary (not central) ordered radii with gaps bounded away from zero.
inline Instance random_instance(std::mt19937_64& rng, int n_max = 6, int ell_max = 12) {
  std::uniform_int_distribution<int> n_dist(1, n_max);
  std::uniform_int_distribution<int> ell_dist(2, ell_max);
  std::uniform_real_distribution<double> mass(0.1, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance in;
  in.params.n = n_dist(rng);
  in.params.ell = ell_dist(rng);
  in.params.m0 = unit(rng) < 0.5 ? 0.0 : 2.0 * unit(rng);
  in.params.lambda = -0.5 - 1.5 * unit(rng);
  in.params.masses.clear();
  for (int i = 0; i < in.params.n; ++i) in.params.masses.push_back(mass(rng));
  in.radii.resize(in.params.n);
  double r = 0.5 + unit(rng);
  for (int i = 0; i < in.params.n; ++i) {
    in.radii(i) = r;
    r += 0.2 + 1.3 * unit(rng);
  }
  return in;
}

/// Radial acceleration of the body at (r_i, 0) summed over every other body
/// in the plane, with no angle folding or phi series.
inline double brute_force_acceleration(const SpiderwebParams& p, const Eigen::VectorXd& r, int i) {
  const std::complex<double> z0(r(i), 0.0);
  std::complex<double> acc = -p.m0 * z0 / std::pow(std::abs(z0), 3);
  for (int j = 0; j < r.size(); ++j) {
    for (int k = 0; k < p.ell; ++k) {
      if (j == i && k == 0) continue;
      const std::complex<double> z = std::polar(r(j), 2.0 * M_PI * k / p.ell);
      const std::complex<double> d = z - z0;
      acc += p.masses[static_cast<std::size_t>(j)] * d / std::pow(std::abs(d), 3);
    }
  }
  return acc.real();
}

inline Eigen::VectorXd brute_force_residual(const SpiderwebParams& p, const Eigen::VectorXd& r) {
  Eigen::VectorXd f(r.size());
  for (int i = 0; i < r.size(); ++i) f(i) = p.lambda * r(i) - brute_force_acceleration(p, r, i);
  return f;
}

inline SpiderwebParams unit_params(int n, int ell, double m0 = 0.0) {
  SpiderwebParams p;
  p.n = n;
  p.ell = ell;
  p.m0 = m0;
  p.masses.assign(static_cast<std::size_t>(n), 1.0);
  return p;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace testing_support

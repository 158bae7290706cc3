#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

#include "spiderweb/interval.hpp"

namespace spiderweb {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IVector = Vector<Interval>;
using IMatrix = Matrix<Interval>;

/// The numeric kinds the formulas are instantiated at. Float mode takes the
/// midpoint of the rigorous cosine enclosure so that, operation for
/// operation, float results stay inside the interval results.
template <class Scalar>
struct ScalarKind;

template <>
struct ScalarKind<double> {
  static double cos_pi_ratio(std::int64_t p, std::int64_t q) { return Interval::cos_pi_ratio(p, q).mid(); }
  static bool certainly_positive(double x) { return x > 0.0; }
  static double upper(double x) { return x; }
  static double lower(double x) { return x; }
};

template <>
struct ScalarKind<Interval> {
  static Interval cos_pi_ratio(std::int64_t p, std::int64_t q) { return Interval::cos_pi_ratio(p, q); }
  static bool certainly_positive(const Interval& x) { return x.certainly_positive(); }
  static double upper(const Interval& x) { return x.upper(); }
  static double lower(const Interval& x) { return x.lower(); }
};

template <class Scalar>
Scalar ipow(const Scalar& x, int k) {
  Scalar r(1.0);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

/// x^(p/2) for a nonnegative integer p.
template <class Scalar>
Scalar pow_half(const Scalar& x, int p) {
  using std::sqrt;
  if (p % 2 == 0) return ipow(x, p / 2);
  return ipow(x, p / 2) * sqrt(x);
}

/// Upper bound of the sup norm of a vector.
template <class Derived>
double norm_inf_upper(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(ScalarKind<Scalar>::lower(v(i))), std::abs(ScalarKind<Scalar>::upper(v(i))));
    best = std::max(best, m);
  }
  return best;
}

/// Upper bound of the operator infinity norm (max absolute row sum).
double matrix_norm_inf_upper(const IMatrix& m);

}  // namespace spiderweb

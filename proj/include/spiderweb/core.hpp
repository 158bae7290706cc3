#pragma once

// Spiderweb force model. Every formula is written once over a generic
// Scalar and instantiated at double (solving) and Interval (certifying).
//
// Indexing: rings are zero-based, innermost first. kCenter names the
// central body as a force source.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "spiderweb/errors.hpp"
#include "spiderweb/params.hpp"
#include "spiderweb/scalar.hpp"

namespace spiderweb {

inline constexpr Eigen::Index kCenter = -1;

/// cos(m theta_k) for the spokes theta_k = 2 pi k / ell, folded onto
/// k = 0..ell/2 with multiplicity weights since every term we sum depends on
/// theta_k only through these cosines.
template <class Scalar>
class RingAngles {
 public:
  struct Term {
    Scalar weight;
    Scalar cos1;
    Scalar cos2;
    Scalar cos3;
    Scalar sin_sq;  // 1 - cos1^2, as (1 - cos1)(1 + cos1)
  };

  explicit RingAngles(int ell) : ell_(ell) {
    using std::sqrt;
    if (ell < 2) throw ValidationError("spoke count ell must be at least 2, got " + std::to_string(ell));
    using K = ScalarKind<Scalar>;
    for (int k = 0; 2 * k <= ell; ++k) {
      const bool single = k == 0 || 2 * k == ell;
      Term t{Scalar(single ? 1.0 : 2.0), K::cos_pi_ratio(2 * k, ell), K::cos_pi_ratio(4 * k, ell),
             K::cos_pi_ratio(6 * k, ell), Scalar(0.0)};
      t.sin_sq = (Scalar(1.0) - t.cos1) * (Scalar(1.0) + t.cos1);
      terms_.push_back(t);
    }
    zeta_ = Scalar(0.0);
    for (std::size_t k = 1; k < terms_.size(); ++k) {
      zeta_ = zeta_ + terms_[k].weight / sqrt(Scalar(1.0) - terms_[k].cos1);
    }
  }

  int ell() const { return ell_; }
  const std::vector<Term>& terms() const { return terms_; }
  /// sum_{k=1}^{ell-1} (1 - cos theta_k)^(-1/2)
  const Scalar& zeta() const { return zeta_; }

 private:
  int ell_;
  std::vector<Term> terms_;
  Scalar zeta_;
};

template <class Scalar>
Scalar zeta(int ell) {
  return RingAngles<Scalar>(ell).zeta();
}

namespace detail {

/// |a - b e^{i theta}|^2 written without the cancellation of
/// a^2 + b^2 - 2ab cos(theta).
template <class Scalar>
Scalar squared_distance(const Scalar& a, const Scalar& b, const typename RingAngles<Scalar>::Term& t) {
  const Scalar u = a - b * t.cos1;
  return u * u + b * b * t.sin_sq;
}

template <class Scalar>
void require_separated(const Scalar& d2) {
  if (!ScalarKind<Scalar>::certainly_positive(d2)) {
    throw CollisionError("collision singularity: zero (or not provably nonzero) distance between bodies");
  }
}

template <class Scalar>
void check_radii(const SpiderwebParams& params, const Vector<Scalar>& r) {
  using K = ScalarKind<Scalar>;
  if (static_cast<std::size_t>(r.size()) != params.masses.size()) {
    throw ValidationError("radii length " + std::to_string(r.size()) + " does not match " +
                          std::to_string(params.masses.size()) + " ring masses");
  }
  if (r.size() == 0) throw ValidationError("empty radii vector");
  if (!K::certainly_positive(r(0))) throw ValidationError("innermost radius must be positive");
  for (Eigen::Index i = 0; i + 1 < r.size(); ++i) {
    if (K::upper(r(i)) > K::lower(r(i + 1))) throw ValidationError("radii are not strictly increasing");
    if (!K::certainly_positive(r(i + 1) - r(i))) {
      throw CollisionError("rings " + std::to_string(i + 1) + " and " + std::to_string(i + 2) + " coincide");
    }
  }
}

template <class Scalar>
Scalar two_sqrt_two() {
  using std::sqrt;
  return Scalar(2.0) * sqrt(Scalar(2.0));
}

}  // namespace detail

template <class Scalar>
struct PhiSeries {
  Scalar value;
  Scalar d1;
  Scalar d2;
};

/// phi_nu(x) = sum_k d_k(x)^(-nu), d_k(x) = (1 + x^2 - 2x cos theta_k)^(1/2),
/// with its first two derivatives for nu = 1 in closed trigonometric form.
template <class Scalar>
PhiSeries<Scalar> phi_series(const Scalar& x, const RingAngles<Scalar>& angles, int nu = 1) {
  PhiSeries<Scalar> out{Scalar(0.0), Scalar(0.0), Scalar(0.0)};
  const Scalar one(1.0);
  for (const auto& t : angles.terms()) {
    const Scalar d2 = detail::squared_distance(x, one, t);
    detail::require_separated(d2);
    const Scalar u = x - t.cos1;
    out.value = out.value + t.weight / pow_half(d2, nu);
    out.d1 = out.d1 - t.weight * u / pow_half(d2, 3);
    out.d2 = out.d2 - t.weight * (d2 - Scalar(3.0) * u * u) / pow_half(d2, 5);
  }
  return out;
}

template <class Scalar>
Scalar phi(int nu, const Scalar& x, const RingAngles<Scalar>& angles) {
  Scalar v(0.0);
  const Scalar one(1.0);
  for (const auto& t : angles.terms()) {
    const Scalar d2 = detail::squared_distance(x, one, t);
    detail::require_separated(d2);
    v = v + t.weight / pow_half(d2, nu);
  }
  return v;
}

template <class Scalar>
Scalar phi_d1(const Scalar& x, const RingAngles<Scalar>& angles) {
  return phi_series(x, angles).d1;
}

template <class Scalar>
Scalar phi_d2(const Scalar& x, const RingAngles<Scalar>& angles) {
  return phi_series(x, angles).d2;
}

/// F_ij / m_i: radial force per unit mass on a body of ring i due to ring j
/// (or the central body when j == kCenter). Positive points outward.
template <class Scalar>
Scalar force_per_unit_mass(const SpiderwebParams& params, const Vector<Scalar>& r, Eigen::Index i, Eigen::Index j,
                           const RingAngles<Scalar>& angles) {
  detail::check_radii(params, r);
  const Scalar ri2 = r(i) * r(i);
  if (j == kCenter) return -Scalar(params.m0) / ri2;
  const Scalar mj(params.masses[static_cast<std::size_t>(j)]);
  if (j == i) return -mj * angles.zeta() / (detail::two_sqrt_two<Scalar>() * ri2);
  if (j < i) {
    const Scalar y = r(j) / r(i);
    const auto s = phi_series(y, angles);
    return -mj / ri2 * (s.value + y * s.d1);
  }
  const Scalar x = r(i) / r(j);
  return mj * x * x / ri2 * phi_d1(x, angles);
}

namespace detail {

/// Total radial acceleration of a body at radius rho due to the rings
/// (excluding ring `skip`, its own) and the central body. The self-ring
/// term is added by the caller.
template <class Scalar>
Scalar external_acceleration(const SpiderwebParams& params, const Vector<Scalar>& r, const Scalar& rho,
                             Eigen::Index skip, const RingAngles<Scalar>& angles) {
  const Scalar rho2 = rho * rho;
  Scalar acc = -Scalar(params.m0) / rho2;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (j == skip) continue;
    const Scalar mj(params.masses[static_cast<std::size_t>(j)]);
    if (ScalarKind<Scalar>::upper(r(j)) < ScalarKind<Scalar>::lower(rho)) {
      const Scalar y = r(j) / rho;
      const auto s = phi_series(y, angles);
      acc = acc - mj / rho2 * (s.value + y * s.d1);
    } else if (ScalarKind<Scalar>::lower(r(j)) > ScalarKind<Scalar>::upper(rho)) {
      const Scalar x = rho / r(j);
      acc = acc + mj * x * x / rho2 * phi_d1(x, angles);
    } else {
      throw CollisionError("body radius coincides with ring " + std::to_string(j + 1));
    }
  }
  return acc;
}

template <class Scalar>
Scalar ring_acceleration(const SpiderwebParams& params, const Vector<Scalar>& r, Eigen::Index i,
                         const RingAngles<Scalar>& angles) {
  const Scalar mi(params.masses[static_cast<std::size_t>(i)]);
  const Scalar self = -mi * angles.zeta() / (two_sqrt_two<Scalar>() * r(i) * r(i));
  return self + external_acceleration(params, r, r(i), i, angles);
}

}  // namespace detail

/// f_i(r) = lambda r_i - F_i / m_i. Zero exactly at a central configuration.
template <class Scalar>
Vector<Scalar> residual(const SpiderwebParams& params, const Vector<Scalar>& r, const RingAngles<Scalar>& angles) {
  detail::check_radii(params, r);
  Vector<Scalar> f(r.size());
  const Scalar lambda(params.lambda);
  for (Eigen::Index i = 0; i < r.size(); ++i) f(i) = lambda * r(i) - detail::ring_acceleration(params, r, i, angles);
  return f;
}

/// lambda_i = F_i / (m_i r_i); r is central for lambda iff all lambda_i equal lambda.
template <class Scalar>
Vector<Scalar> lambda_values(const SpiderwebParams& params, const Vector<Scalar>& r, const RingAngles<Scalar>& angles) {
  detail::check_radii(params, r);
  Vector<Scalar> out(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) out(i) = detail::ring_acceleration(params, r, i, angles) / r(i);
  return out;
}

/// Lambda_i = lambda_i - lambda_{i+1}.
template <class Scalar>
Vector<Scalar> lambda_gaps(const SpiderwebParams& params, const Vector<Scalar>& r, const RingAngles<Scalar>& angles) {
  const Vector<Scalar> l = lambda_values(params, r, angles);
  Vector<Scalar> out(std::max<Eigen::Index>(0, l.size() - 1));
  for (Eigen::Index i = 0; i + 1 < l.size(); ++i) out(i) = l(i) - l(i + 1);
  return out;
}

/// lambda of a massless probe body at radius rho among the given rings.
template <class Scalar>
Scalar probe_lambda(const SpiderwebParams& params, const Vector<Scalar>& r, const Scalar& rho,
                    const RingAngles<Scalar>& angles) {
  detail::check_radii(params, r);
  if (!ScalarKind<Scalar>::certainly_positive(rho)) throw ValidationError("probe radius must be positive");
  return detail::external_acceleration(params, r, rho, kCenter, angles) / rho;
}

/// Jacobian D_r f in the trigonometric form written directly in the radii.
template <class Scalar>
Matrix<Scalar> jacobian(const SpiderwebParams& params, const Vector<Scalar>& r, const RingAngles<Scalar>& angles) {
  using std::sqrt;
  detail::check_radii(params, r);
  const Eigen::Index n = r.size();
  Matrix<Scalar> J = Matrix<Scalar>::Zero(n, n);
  const Scalar lambda(params.lambda);
  const Scalar m0(params.m0);
  const Scalar sqrt2 = sqrt(Scalar(2.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ri = r(i);
    const Scalar ri2 = ri * ri;
    const Scalar ri3 = ri2 * ri;
    const Scalar mi(params.masses[static_cast<std::size_t>(i)]);
    Scalar diag = lambda - mi * angles.zeta() / (sqrt2 * ri3) - Scalar(2.0) * m0 / ri3;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const Scalar rj = r(j);
      const Scalar rj2 = rj * rj;
      const Scalar rirj = ri * rj;
      const Scalar half_mj = Scalar(params.masses[static_cast<std::size_t>(j)]) / Scalar(2.0);
      Scalar sum_ii(0.0), sum_ij(0.0);
      for (const auto& t : angles.terms()) {
        const Scalar d2 = detail::squared_distance(ri, rj, t);
        detail::require_separated(d2);
        const Scalar d5 = pow_half(d2, 5);
        sum_ii = sum_ii + t.weight * (Scalar(4.0) * ri2 + rj2 - Scalar(8.0) * rirj * t.cos1 + Scalar(3.0) * rj2 * t.cos2) / d5;
        sum_ij = sum_ij + t.weight * (Scalar(-4.0) * (ri2 + rj2) * t.cos1 + rirj * (Scalar(7.0) + t.cos2)) / d5;
      }
      diag = diag - half_mj * sum_ii;
      J(i, j) = -half_mj * sum_ij;
    }
    J(i, i) = diag;
  }
  return J;
}

/// The same Jacobian assembled from phi_1, phi_1', phi_1'' in the ratio
/// variables x_j = r_i / r_j (j > i) and y_j = r_j / r_i (j < i).
template <class Scalar>
Matrix<Scalar> jacobian_phi_form(const SpiderwebParams& params, const Vector<Scalar>& r,
                                 const RingAngles<Scalar>& angles) {
  using std::sqrt;
  detail::check_radii(params, r);
  const Eigen::Index n = r.size();
  Matrix<Scalar> J = Matrix<Scalar>::Zero(n, n);
  const Scalar lambda(params.lambda);
  const Scalar m0(params.m0);
  const Scalar sqrt2 = sqrt(Scalar(2.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ri3 = r(i) * r(i) * r(i);
    const Scalar mi(params.masses[static_cast<std::size_t>(i)]);
    Scalar diag = lambda - mi * angles.zeta() / (sqrt2 * ri3) - Scalar(2.0) * m0 / ri3;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const Scalar mj(params.masses[static_cast<std::size_t>(j)]);
      if (j < i) {
        const Scalar y = r(j) / r(i);
        const auto s = phi_series(y, angles);
        diag = diag - mj / ri3 * (Scalar(2.0) * s.value + Scalar(4.0) * y * s.d1 + y * y * s.d2);
        J(i, j) = mj / ri3 * (Scalar(2.0) * s.d1 + y * s.d2);
      } else {
        const Scalar x = r(i) / r(j);
        const auto s = phi_series(x, angles);
        const Scalar x3 = x * x * x;
        diag = diag - mj * x3 / ri3 * s.d2;
        J(i, j) = mj * x3 / ri3 * (Scalar(2.0) * s.d1 + x * s.d2);
      }
    }
    J(i, i) = diag;
  }
  return J;
}

/// Second derivatives d^2 f_i / dr_l dr_j. Only three families are nonzero:
/// l = j = i, exactly one of l, j equal to i, and l = j != i.
template <class Scalar>
class HessianTensor {
 public:
  explicit HessianTensor(Eigen::Index n)
      : self_(Vector<Scalar>::Zero(n)), cross_(Matrix<Scalar>::Zero(n, n)), other_(Matrix<Scalar>::Zero(n, n)) {}

  Eigen::Index size() const { return self_.size(); }

  Scalar operator()(Eigen::Index i, Eigen::Index l, Eigen::Index j) const {
    if (l == i && j == i) return self_(i);
    if (l == i) return cross_(i, j);
    if (j == i) return cross_(i, l);
    if (l == j) return other_(i, j);
    return Scalar(0.0);
  }

  /// d^2 f_i / dr_i^2
  Scalar& self(Eigen::Index i) { return self_(i); }
  const Scalar& self(Eigen::Index i) const { return self_(i); }
  /// d^2 f_i / dr_i dr_j for j != i
  Scalar& cross(Eigen::Index i, Eigen::Index j) { return cross_(i, j); }
  const Scalar& cross(Eigen::Index i, Eigen::Index j) const { return cross_(i, j); }
  /// d^2 f_i / dr_j^2 for j != i
  Scalar& other(Eigen::Index i, Eigen::Index j) { return other_(i, j); }
  const Scalar& other(Eigen::Index i, Eigen::Index j) const { return other_(i, j); }

 private:
  Vector<Scalar> self_;
  Matrix<Scalar> cross_;
  Matrix<Scalar> other_;
};

template <class Scalar>
HessianTensor<Scalar> hessian(const SpiderwebParams& params, const Vector<Scalar>& r, const RingAngles<Scalar>& angles) {
  using std::sqrt;
  detail::check_radii(params, r);
  const Eigen::Index n = r.size();
  HessianTensor<Scalar> H(n);
  const Scalar m0(params.m0);
  const Scalar sqrt2 = sqrt(Scalar(2.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ri = r(i);
    const Scalar ri2 = ri * ri;
    const Scalar ri4 = ri2 * ri2;
    const Scalar mi(params.masses[static_cast<std::size_t>(i)]);
    Scalar self = Scalar(3.0) * mi * angles.zeta() / (sqrt2 * ri4) + Scalar(6.0) * m0 / ri4;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const Scalar rj = r(j);
      const Scalar rj2 = rj * rj;
      const Scalar rirj = ri * rj;
      const Scalar mj(params.masses[static_cast<std::size_t>(j)]);
      Scalar sum_self(0.0), sum_cross(0.0), sum_other(0.0);
      for (const auto& t : angles.terms()) {
        const Scalar d2 = detail::squared_distance(ri, rj, t);
        detail::require_separated(d2);
        const Scalar d7 = pow_half(d2, 7);
        sum_self = sum_self + t.weight * (ri - rj * t.cos1) *
                                  (Scalar(4.0) * ri2 - rj2 - Scalar(8.0) * rirj * t.cos1 + Scalar(5.0) * rj2 * t.cos2) / d7;
        sum_cross = sum_cross + t.weight *
                                    (ri * (Scalar(8.0) * ri2 + Scalar(23.0) * rj2) * t.cos1 -
                                     rj * (Scalar(20.0) * ri2 + Scalar(2.0) * rj2 +
                                           (Scalar(4.0) * ri2 + Scalar(6.0) * rj2) * t.cos2 - rirj * t.cos3)) /
                                    d7;
        sum_other = sum_other + t.weight *
                                    (rj * (Scalar(8.0) * rj2 + Scalar(23.0) * ri2) * t.cos1 -
                                     ri * (Scalar(20.0) * rj2 + Scalar(2.0) * ri2 +
                                           (Scalar(4.0) * rj2 + Scalar(6.0) * ri2) * t.cos2 - rirj * t.cos3)) /
                                    d7;
      }
      self = self + Scalar(3.0) * mj / Scalar(2.0) * sum_self;
      H.cross(i, j) = -(Scalar(3.0) * mj / Scalar(4.0)) * sum_cross;
      H.other(i, j) = -(Scalar(3.0) * mj / Scalar(4.0)) * sum_other;
    }
    H.self(i) = self;
  }
  return H;
}

/// h_ell(x) = sum_{k=1}^{ell-1} (1 - c_k)(2x^2 + x(3 - c_k) - 1 - 3c_k) / (1 + x^2 - 2x c_k)^(5/2),
/// the kernel of the row-dominance margin.
template <class Scalar>
Scalar h_ell(const Scalar& x, const RingAngles<Scalar>& angles) {
  Scalar v(0.0);
  const Scalar one(1.0);
  const auto& terms = angles.terms();
  for (std::size_t k = 1; k < terms.size(); ++k) {
    const auto& t = terms[k];
    const Scalar d2 = detail::squared_distance(x, one, t);
    detail::require_separated(d2);
    const Scalar num = (one - t.cos1) * (Scalar(2.0) * x * x + x * (Scalar(3.0) - t.cos1) - one - Scalar(3.0) * t.cos1);
    v = v + t.weight * num / pow_half(d2, 5);
  }
  return v;
}

template <class Scalar>
Scalar h_ell_d1(const Scalar& x, const RingAngles<Scalar>& angles) {
  Scalar v(0.0);
  const Scalar one(1.0);
  const auto& terms = angles.terms();
  for (std::size_t k = 1; k < terms.size(); ++k) {
    const auto& t = terms[k];
    const Scalar d2 = detail::squared_distance(x, one, t);
    detail::require_separated(d2);
    const Scalar poly = Scalar(2.0) * x * x + x * (Scalar(3.0) - t.cos1) - one - Scalar(3.0) * t.cos1;
    const Scalar dpoly = Scalar(4.0) * x + Scalar(3.0) - t.cos1;
    v = v + t.weight * (one - t.cos1) * (dpoly * d2 - Scalar(5.0) * (x - t.cos1) * poly) / pow_half(d2, 7);
  }
  return v;
}

/// Row margins -d_i f_i - sum_{j != i} d_j f_i written as
/// -lambda + m_i zeta / (sqrt2 r_i^3) + 2 m0 / r_i^3 + sum_{j != i} m_j x_j^3 h_ell(x_j) / r_i^3
/// with x_j = r_i / r_j.
template <class Scalar>
Vector<Scalar> row_dominance_margin(const SpiderwebParams& params, const Vector<Scalar>& r,
                                    const RingAngles<Scalar>& angles) {
  using std::sqrt;
  detail::check_radii(params, r);
  const Eigen::Index n = r.size();
  Vector<Scalar> out(n);
  const Scalar sqrt2 = sqrt(Scalar(2.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ri3 = r(i) * r(i) * r(i);
    const Scalar mi(params.masses[static_cast<std::size_t>(i)]);
    Scalar v = -Scalar(params.lambda) + mi * angles.zeta() / (sqrt2 * ri3) + Scalar(2.0) * Scalar(params.m0) / ri3;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const Scalar x = r(i) / r(j);
      v = v + Scalar(params.masses[static_cast<std::size_t>(j)]) * x * x * x * h_ell(x, angles) / ri3;
    }
    out(i) = v;
  }
  return out;
}

// Convenience overloads that build the angle table on the fly.

template <class Scalar>
Vector<Scalar> residual(const SpiderwebParams& params, const Vector<Scalar>& r) {
  return residual(params, r, RingAngles<Scalar>(params.ell));
}

template <class Scalar>
Matrix<Scalar> jacobian(const SpiderwebParams& params, const Vector<Scalar>& r) {
  return jacobian(params, r, RingAngles<Scalar>(params.ell));
}

template <class Scalar>
HessianTensor<Scalar> hessian(const SpiderwebParams& params, const Vector<Scalar>& r) {
  return hessian(params, r, RingAngles<Scalar>(params.ell));
}

template <class Scalar>
Vector<Scalar> lambda_values(const SpiderwebParams& params, const Vector<Scalar>& r) {
  return lambda_values(params, r, RingAngles<Scalar>(params.ell));
}

/// Promote a float vector to point intervals.
inline IVector to_interval(const Eigen::VectorXd& v) { return v.cast<Interval>(); }

}  // namespace spiderweb

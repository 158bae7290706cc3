#include "spiderweb/certify.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "spiderweb/core.hpp"

namespace spiderweb {

namespace {

constexpr int kRhoRetries = 4;
constexpr int kDerivPieces = 64;
constexpr int kPresample = 1024;
constexpr int kMaxLowerBoundHalvings = 5;
constexpr long kMaxGridPoints = 50'000'000;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

IVector mat_vec(const Eigen::MatrixXd& A, const IVector& v) {
  IVector out(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Interval s(0.0);
    for (Eigen::Index j = 0; j < A.cols(); ++j) s += Interval(A(i, j)) * v(j);
    out(i) = s;
  }
  return out;
}

void require_square(const Eigen::MatrixXd& A, const Eigen::VectorXd& center) {
  if (A.rows() != center.size() || A.cols() != center.size()) {
    throw ValidationError("A must be " + std::to_string(center.size()) + "x" + std::to_string(center.size()));
  }
}

IVector ball_box(const Eigen::VectorXd& center, double rho) {
  IVector box(center.size());
  for (Eigen::Index i = 0; i < center.size(); ++i) box(i) = ball(center(i), rho);
  return box;
}

Interval unit_piece(long s, long pieces) {
  return hull(Interval::ratio(s, pieces), Interval::ratio(s + 1, pieces));
}

/// h over X by the mean-value form, intersected with the direct enclosure.
double h_lower_on(const Interval& X, const RingAngles<Interval>& angles) {
  const Interval c(X.mid());
  const Interval mv = h_ell(c, angles) + h_ell_d1(X, angles) * (X - c);
  const Interval direct = h_ell(X, angles);
  return std::max(mv.lower(), direct.lower());
}

}  // namespace

double bound_Y0(const Eigen::MatrixXd& A, const Eigen::VectorXd& center, const SpiderwebParams& params) {
  require_square(A, center);
  const IVector f = residual(params, to_interval(center), RingAngles<Interval>(params.ell));
  return norm_inf_upper(mat_vec(A, f));
}

double bound_Z0(const Eigen::MatrixXd& A, const Eigen::VectorXd& center, const SpiderwebParams& params) {
  require_square(A, center);
  const Eigen::Index n = center.size();
  const IMatrix J = jacobian(params, to_interval(center), RingAngles<Interval>(params.ell));
  IMatrix B(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      Interval s(i == k ? 1.0 : 0.0);
      for (Eigen::Index j = 0; j < n; ++j) s -= Interval(A(i, j)) * J(j, k);
      B(i, k) = s;
    }
  }
  return matrix_norm_inf_upper(B);
}

bool ball_in_cone(const Eigen::VectorXd& center, double rho) {
  if (center.size() == 0 || !(rho >= 0.0) || !std::isfinite(rho)) return false;
  const IVector box = ball_box(center, rho);
  if (!box(0).certainly_positive()) return false;
  for (Eigen::Index i = 0; i + 1 < box.size(); ++i) {
    if (!(box(i).upper() < box(i + 1).lower())) return false;
  }
  return true;
}

double bound_Z2(const Eigen::MatrixXd& A, const Eigen::VectorXd& center, const SpiderwebParams& params,
                double rho_star) {
  require_square(A, center);
  if (!(rho_star > 0.0) || !std::isfinite(rho_star)) throw ValidationError("rho_star must be positive and finite");
  if (!ball_in_cone(center, rho_star)) {
    throw CertificationFailed(CertificationFailed::Reason::BallLeavesCone,
                              "ball of radius " + fmt(rho_star) + " around the center leaves the ordered cone");
  }
  const Eigen::Index n = center.size();
  const HessianTensor<Interval> H = hessian(params, ball_box(center, rho_star), RingAngles<Interval>(params.ell));

  // sum_j A_ij H_j(k, m) has at most two terms for k != m (j = k or j = m)
  // and all j for k = m.
  double best = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Interval total(0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index m = 0; m < n; ++m) {
        Interval b;
        if (k == m) {
          b = Interval(A(i, k)) * H.self(k);
          for (Eigen::Index j = 0; j < n; ++j) {
            if (j != k) b += Interval(A(i, j)) * H.other(j, k);
          }
        } else {
          b = Interval(A(i, k)) * H.cross(k, m) + Interval(A(i, m)) * H.cross(m, k);
        }
        total += Interval(b.mag());
      }
    }
    best = std::max(best, total.upper());
  }
  return best;
}

RadiiPolyResult radii_poly_check(double Y0, double Z0, double Z2, double rho_star) {
  for (double v : {Y0, Z0, Z2}) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("radii polynomial bounds must be finite and nonnegative");
  }
  if (!(rho_star > 0.0) || !std::isfinite(rho_star)) throw ValidationError("rho_star must be positive and finite");
  if (Z0 >= 1.0) {
    throw CertificationFailed(CertificationFailed::Reason::Z0TooLarge, "Z0 = " + fmt(Z0) + " is not below 1");
  }

  const Interval a = Interval(1.0) - Interval(Z0);
  auto p_upper = [&](double rho) {
    const Interval r(rho);
    return (Interval(Z2) * r * r - a * r + Interval(Y0)).upper();
  };

  const double af = 1.0 - Z0;
  const double disc = af * af - 4.0 * Z2 * Y0;
  if (!(disc > 0.0)) {
    throw CertificationFailed(CertificationFailed::Reason::NoNegativeValue,
                              "radii polynomial has no negative value (discriminant " + fmt(disc) + ")");
  }
  // Smaller root without cancellation; a tiny floor keeps Y0 = 0 away from subnormals.
  const double root = std::max(2.0 * Y0 / (af + std::sqrt(disc)), 0x1p-900);

  std::vector<double> candidates;
  candidates.push_back(rounding::next_up(root));
  for (double rel : {1e-15, 1e-12, 1e-9, 1e-6, 1e-3, 1e-1}) candidates.push_back(rounding::next_up(root * (1.0 + rel)));
  candidates.push_back(Z2 > 0.0 ? af / (2.0 * Z2) : 2.0 * root);

  for (double rho : candidates) {
    if (!(rho > 0.0) || rho > rho_star) continue;
    const double p = p_upper(rho);
    if (p < 0.0) return RadiiPolyResult{rho, p};
  }
  throw CertificationFailed(CertificationFailed::Reason::NoNegativeValue,
                            "no rho0 <= rho_star = " + fmt(rho_star) + " with p(rho0) < 0 (smallest root " + fmt(root) +
                                "); increase rho_star");
}

double default_rho_star(const Eigen::VectorXd& radii) {
  require_in_cone(radii);
  double gap = radii(0);
  for (Eigen::Index i = 0; i + 1 < radii.size(); ++i) gap = std::min(gap, radii(i + 1) - radii(i));
  return 1e-4 * gap;
}

Certificate certify(const Configuration& config, std::optional<double> rho_star_init) {
  const SpiderwebParams& params = config.params;
  params.validate();
  const Eigen::VectorXd& center = config.radii;
  require_in_cone(center);
  const double rho_init = rho_star_init ? *rho_star_init : default_rho_star(center);
  if (!(rho_init > 0.0) || !std::isfinite(rho_init)) throw ValidationError("rho_star must be positive and finite");

  try {
    const Eigen::MatrixXd J = jacobian(params, center, RingAngles<double>(params.ell));
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const Eigen::MatrixXd A = lu.inverse();
    if (!A.allFinite()) {
      throw CertificationFailed(CertificationFailed::Reason::EvaluationFailed, "numerical Jacobian is not invertible");
    }

    Certificate cert;
    cert.center = center;
    cert.Y0 = bound_Y0(A, center, params);
    cert.Z0 = bound_Z0(A, center, params);
    if (cert.Z0 >= 1.0) {
      throw CertificationFailed(CertificationFailed::Reason::Z0TooLarge, "Z0 = " + fmt(cert.Z0) + " is not below 1");
    }

    std::vector<double> ladder{rho_init};
    for (int k = 1; k <= kRhoRetries; ++k) ladder.push_back(rho_init * std::ldexp(1.0, -k));
    for (int k = 1; k <= kRhoRetries; ++k) ladder.push_back(rho_init * std::ldexp(1.0, k));

    std::optional<CertificationFailed> last;
    for (std::size_t attempt = 0; attempt < ladder.size(); ++attempt) {
      const double rho_star = ladder[attempt];
      try {
        const double Z2 = bound_Z2(A, center, params, rho_star);
        const RadiiPolyResult r = radii_poly_check(cert.Y0, cert.Z0, Z2, rho_star);
        cert.rho_star = rho_star;
        cert.Z2 = Z2;
        cert.rho0 = r.rho0;
        cert.p_at_rho0 = r.p_upper;
        cert.retries = static_cast<int>(attempt);
        return cert;
      } catch (const CertificationFailed& e) {
        last = e;
      } catch (const CollisionError& e) {
        last = CertificationFailed(CertificationFailed::Reason::BallLeavesCone, e.what());
      }
    }
    throw CertificationFailed(last->reason(), std::string("all rho_star retries failed; last: ") + last->what());
  } catch (const IntervalError& e) {
    throw CertificationFailed(CertificationFailed::Reason::EvaluationFailed,
                              std::string("interval evaluation failed: ") + e.what());
  }
}

template <class Scalar>
Scalar h_ell_closed_form(int ell, const Scalar& x) {
  using std::sqrt;
  const Scalar one(1.0);
  switch (ell) {
    case 2:
      return Scalar(4.0) / ipow(one + x, 3);
    case 3:
      return Scalar(3.0) * (Scalar(0.5) + Scalar(3.5) * x + Scalar(2.0) * x * x) / pow_half(one + x + x * x, 5);
    case 4:
      return Scalar(4.0) / ipow(one + x, 3) +
             Scalar(2.0) * (Scalar(2.0) * x * x + Scalar(3.0) * x - one) / pow_half(one + x * x, 5);
    default:
      throw ValidationError("closed form of h_ell only for ell = 2, 3, 4");
  }
}

template double h_ell_closed_form<double>(int, const double&);
template Interval h_ell_closed_form<Interval>(int, const Interval&);

HCheckReport h_ell_check(int ell, int grid_points) {
  if (grid_points < 0) throw ValidationError("grid_points must be nonnegative");
  const RingAngles<Interval> angles(ell);
  const RingAngles<double> fangles(ell);
  HCheckReport rep;
  rep.ell = ell;

  const Interval unit(0.0, 1.0);
  if (ell == 2 || ell == 3) {
    rep.closed_form_verified = h_ell_closed_form(ell, unit).certainly_positive();
  } else if (ell == 4) {
    // v = (1+x)^3 h_4 has v' = 6x(1+x)^2(7-3x^2)/(1+x^2)^(7/2) >= 0 on [0,1], so v >= v(0).
    const Interval v0 = h_ell_closed_form(4, Interval(0.0));
    const Interval slope_factor = Interval(7.0) - Interval(3.0) * square(unit);
    rep.closed_form_verified = v0.certainly_positive() && slope_factor.certainly_positive();
  }

  double M = 0.0;
  for (long s = 0; s < kDerivPieces; ++s) M = std::max(M, h_ell_d1(unit_piece(s, kDerivPieces), angles).mag());
  rep.deriv_bound = M;

  double fmin = INFINITY;
  double argmin = 0.0;
  for (int q = 0; q <= kPresample; ++q) {
    const double x = static_cast<double>(q) / kPresample;
    const double v = h_ell(x, fangles);
    if (v < fmin) {
      fmin = v;
      argmin = x;
    }
  }

  if (fmin > 0.0) {
    double m = 0.5 * fmin;
    for (int attempt = 0; attempt < kMaxLowerBoundHalvings && !rep.verified; ++attempt, m *= 0.5) {
      const double need = std::ceil(M / m) + 1.0;
      const long p = grid_points > 0 ? grid_points : static_cast<long>(std::min<double>(need, kMaxGridPoints));
      if (!(rounding::div_up(M, static_cast<double>(p)) < m)) {
        if (grid_points > 0) break;
        continue;
      }
      bool ok = true;
      for (long q = 0; q <= p && ok; ++q) ok = h_ell(Interval::ratio(q, p), angles).lower() > m;
      rep.grid_points = static_cast<int>(p);
      rep.lower_bound = m;
      rep.verified = ok;
    }
    return rep;
  }

  // Negative sample: refine it locally, then confirm the sign rigorously.
  double lo = std::max(0.0, argmin - 1.0 / kPresample);
  double hi = std::min(1.0, argmin + 1.0 / kPresample);
  for (int it = 0; it < 60; ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (h_ell(a, fangles) < h_ell(b, fangles)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  double x = 0.5 * (lo + hi);
  if (h_ell(x, fangles) > fmin) x = argmin;
  const Interval hx = h_ell(Interval(x), angles);
  if (hx.certainly_negative()) {
    rep.witness_x = x;
    rep.witness_value = hx;
  }
  return rep;
}

bool h_ell_exceeds(int ell, double bound, int max_depth) {
  const RingAngles<Interval> angles(ell);
  std::vector<std::pair<Interval, int>> stack{{Interval(0.0, 1.0), 0}};
  while (!stack.empty()) {
    auto [X, depth] = stack.back();
    stack.pop_back();
    if (h_lower_on(X, angles) > bound) continue;
    if (h_ell(Interval(X.mid()), angles).upper() <= bound) return false;
    if (depth >= max_depth) return false;
    const double c = X.mid();
    stack.push_back({Interval(X.lower(), c), depth + 1});
    stack.push_back({Interval(c, X.upper()), depth + 1});
  }
  return true;
}

double h_ell_lower_bound(int ell, int pieces) {
  if (pieces < 1) throw ValidationError("pieces must be positive");
  const RingAngles<Interval> angles(ell);
  double best = INFINITY;
  for (long s = 0; s < pieces; ++s) best = std::min(best, h_lower_on(unit_piece(s, pieces), angles));
  return best;
}

Interval zeta_enclosure(int ell) { return RingAngles<Interval>(ell).zeta(); }

bool dominance_check(const SpiderwebParams& params, const Eigen::VectorXd& radii) {
  require_in_cone(radii);
  const IVector r = to_interval(radii);
  const RingAngles<Interval> angles(params.ell);
  const IMatrix J = jacobian(params, r, angles);
  const Eigen::Index n = radii.size();
  bool direct = true;
  bool signs_known = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    Interval off(0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      off += Interval(J(i, j).mag());
      if (J(i, j).lower() < 0.0) signs_known = false;
    }
    if (!J(i, i).certainly_negative()) signs_known = false;
    if (!(J(i, i).mig() > off.upper())) direct = false;
  }
  if (direct) return true;
  // With a negative diagonal and nonnegative off-diagonal entries the margin
  // is exactly the signed row sum, which the h_ell form evaluates with less
  // cancellation.
  if (!signs_known) return false;
  const IVector margin = row_dominance_margin(params, r, angles);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!margin(i).certainly_positive()) return false;
  }
  return true;
}

}  // namespace spiderweb

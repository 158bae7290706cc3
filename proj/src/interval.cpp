#include "spiderweb/interval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace spiderweb {
namespace rounding {
namespace {

constexpr double kMax = std::numeric_limits<double>::max();
// Below this magnitude an fma residual may itself be rounded (gradual
// underflow), so we fall back to a blind one-ulp widening.
constexpr double kResidualSafe = 0x1p-960;

// Brackets the exact value s + err, where s is the rounded result.
inline double lower_of(double s, double err) { return err < 0.0 ? next_down(s) : s; }
inline double upper_of(double s, double err) { return err > 0.0 ? next_up(s) : s; }

inline double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline bool overflowed(double result, double a, double b) {
  return std::isinf(result) && std::isfinite(a) && std::isfinite(b);
}

}  // namespace

double add_down(double a, double b) {
  const double s = a + b;
  if (overflowed(s, a, b)) return s > 0 ? kMax : s;
  if (!std::isfinite(s)) return s;
  return lower_of(s, two_sum_err(a, b, s));
}

double add_up(double a, double b) {
  const double s = a + b;
  if (overflowed(s, a, b)) return s < 0 ? -kMax : s;
  if (!std::isfinite(s)) return s;
  return upper_of(s, two_sum_err(a, b, s));
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
  const double p = a * b;
  if (overflowed(p, a, b)) return p > 0 ? kMax : p;
  if (!std::isfinite(p)) return p;
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::abs(p) < kResidualSafe) return next_down(p);
  return lower_of(p, std::fma(a, b, -p));
}

double mul_up(double a, double b) {
  const double p = a * b;
  if (overflowed(p, a, b)) return p < 0 ? -kMax : p;
  if (!std::isfinite(p)) return p;
  if (a == 0.0 || b == 0.0) return 0.0;
  if (std::abs(p) < kResidualSafe) return next_up(p);
  return upper_of(p, std::fma(a, b, -p));
}

namespace {

// Sign of (exact quotient - q) for q = fl(a / b).
inline double quotient_err(double a, double b, double q) {
  const double r = std::fma(-q, b, a);
  return b > 0 ? r : -r;
}

}  // namespace

double div_down(double a, double b) {
  const double q = a / b;
  if (overflowed(q, a, b)) return q > 0 ? kMax : q;
  if (!std::isfinite(q)) return q;
  if (a == 0.0) return 0.0;
  if (std::abs(q) < kResidualSafe || std::abs(a) < kResidualSafe) return next_down(q);
  return lower_of(q, quotient_err(a, b, q));
}

double div_up(double a, double b) {
  const double q = a / b;
  if (overflowed(q, a, b)) return q < 0 ? -kMax : q;
  if (!std::isfinite(q)) return q;
  if (a == 0.0) return 0.0;
  if (std::abs(q) < kResidualSafe || std::abs(a) < kResidualSafe) return next_up(q);
  return upper_of(q, quotient_err(a, b, q));
}

double sqrt_down(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0 || !std::isfinite(s)) return s;
  if (a < kResidualSafe) return std::max(0.0, next_down(s));
  return std::max(0.0, lower_of(s, std::fma(-s, s, a)));
}

double sqrt_up(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0 || !std::isfinite(s)) return s;
  if (a < kResidualSafe) return next_up(s);
  return upper_of(s, std::fma(-s, s, a));
}

}  // namespace rounding

using namespace rounding;

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) {
    throw IntervalError(IntervalError::Kind::InvalidBounds, "interval with lo > hi or NaN endpoint");
  }
}

Interval Interval::from_int(std::int64_t p) {
  const double d = static_cast<double>(p);
  if (std::abs(p) <= (std::int64_t{1} << 53)) return Interval(d);
  return Interval(next_down(d), next_up(d));
}

Interval Interval::ratio(std::int64_t p, std::int64_t q) { return from_int(p) / from_int(q); }

Interval Interval::pi() {
  // M_PI is the double just below pi.
  constexpr double kPiLow = 3.141592653589793115997963468544185161590576171875;
  return Interval(kPiLow, next_up(kPiLow));
}

namespace {

constexpr int kSeriesTerms = 14;

// Horner evaluation of sum_k (-1)^k a^(2k + first) / (2k + first)! on a
// point argument a: first = 0 gives cos(a), first = 1 gives sin(a).
Interval alternating_series(double a, int first) {
  const Interval x(a);
  const Interval t = square(x);
  Interval coeff[kSeriesTerms];
  coeff[0] = Interval(1.0);
  for (int k = 1; k < kSeriesTerms; ++k) {
    const auto d = static_cast<std::int64_t>((2 * k - 1 + first) * (2 * k + first));
    coeff[k] = -coeff[k - 1] / Interval::from_int(d);
  }
  Interval acc = coeff[kSeriesTerms - 1];
  for (int k = kSeriesTerms - 2; k >= 0; --k) acc = coeff[k] + t * acc;
  if (first == 1) acc *= x;
  // Alternating series with decreasing terms for |a| < 1: the remainder is
  // bounded by the first omitted term.
  Interval tail = Interval(1.0);
  const int power = 2 * kSeriesTerms + first;
  for (int k = 0; k < power; ++k) tail *= Interval(std::abs(a));
  for (int k = 2; k <= power; ++k) tail /= Interval::from_int(k);
  return acc + Interval(-tail.upper(), tail.upper());
}

}  // namespace

Interval Interval::cos_pi_ratio(std::int64_t p, std::int64_t q) {
  if (q <= 0) throw IntervalError(IntervalError::Kind::InvalidBounds, "cos_pi_ratio requires q > 0");
  // cos(pi p/q) is 2q-periodic and even in p.
  p %= 2 * q;
  if (p < 0) p += 2 * q;
  if (p > q) p = 2 * q - p;
  const std::int64_t g = std::gcd(p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  double sign = 1.0;
  if (2 * p > q) {
    p = q - p;
    sign = -1.0;
  }
  // Now 0 <= p/q <= 1/2.
  if (p == 0) return Interval(sign);
  if (2 * p == q) return Interval(0.0);
  if (3 * p == q) return Interval(0.5 * sign);

  Interval result;
  if (4 * p <= q) {
    // cos is decreasing on [0, pi/4].
    const Interval arg = pi() * ratio(p, q);
    const Interval at_hi = alternating_series(arg.upper(), 0);
    const Interval at_lo = alternating_series(arg.lower(), 0);
    result = Interval(at_hi.lower(), std::min(1.0, at_lo.upper()));
  } else {
    // cos(pi p/q) = sin(pi (q - 2p) / (2q)) with the argument in (0, pi/4).
    const Interval arg = pi() * ratio(q - 2 * p, 2 * q);
    const Interval at_lo = alternating_series(arg.lower(), 1);
    const Interval at_hi = alternating_series(arg.upper(), 1);
    result = Interval(std::max(0.0, at_lo.lower()), at_hi.upper());
  }
  return sign > 0 ? result : -result;
}

double Interval::mid() const {
  if (lo_ == hi_) return lo_;
  if (!std::isfinite(lo_) || !std::isfinite(hi_)) return lo_ + hi_;
  return 0.5 * lo_ + 0.5 * hi_;
}

double Interval::mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }

double Interval::mig() const {
  if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
  return std::min(std::abs(lo_), std::abs(hi_));
}

Interval& Interval::operator+=(const Interval& o) {
  const double lo = add_down(lo_, o.lo_);
  hi_ = add_up(hi_, o.hi_);
  lo_ = lo;
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  const double lo = sub_down(lo_, o.hi_);
  hi_ = sub_up(hi_, o.lo_);
  lo_ = lo;
  return *this;
}

Interval& Interval::operator*=(const Interval& o) {
  const double a = lo_, b = hi_, c = o.lo_, d = o.hi_;
  if (a >= 0.0 && c >= 0.0) {
    lo_ = mul_down(a, c);
    hi_ = mul_up(b, d);
    return *this;
  }
  lo_ = std::min({mul_down(a, c), mul_down(a, d), mul_down(b, c), mul_down(b, d)});
  hi_ = std::max({mul_up(a, c), mul_up(a, d), mul_up(b, c), mul_up(b, d)});
  return *this;
}

Interval& Interval::operator/=(const Interval& o) {
  if (o.lo_ <= 0.0 && o.hi_ >= 0.0) {
    throw IntervalError(IntervalError::Kind::DivisionByZero, "interval division by an interval containing zero");
  }
  const double a = lo_, b = hi_, c = o.lo_, d = o.hi_;
  lo_ = std::min({div_down(a, c), div_down(a, d), div_down(b, c), div_down(b, d)});
  hi_ = std::max({div_up(a, c), div_up(a, d), div_up(b, c), div_up(b, d)});
  return *this;
}

Interval sqrt(const Interval& x) {
  if (x.lo_ < 0.0) throw IntervalError(IntervalError::Kind::NegativeSqrt, "sqrt of an interval with negative part");
  return Interval(sqrt_down(x.lo_), sqrt_up(x.hi_), Interval::Unchecked{});
}

Interval square(const Interval& x) {
  if (x.lo_ >= 0.0) return Interval(mul_down(x.lo_, x.lo_), mul_up(x.hi_, x.hi_), Interval::Unchecked{});
  if (x.hi_ <= 0.0) return Interval(mul_down(x.hi_, x.hi_), mul_up(x.lo_, x.lo_), Interval::Unchecked{});
  return Interval(0.0, std::max(mul_up(x.lo_, x.lo_), mul_up(x.hi_, x.hi_)), Interval::Unchecked{});
}

Interval abs(const Interval& x) {
  if (x.lo_ >= 0.0) return x;
  if (x.hi_ <= 0.0) return -x;
  return Interval(0.0, std::max(-x.lo_, x.hi_), Interval::Unchecked{});
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_), Interval::Unchecked{});
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << '[' << x.lo_ << ", " << x.hi_ << ']';
  os.flags(flags);
  os.precision(prec);
  return os;
}

Interval ball(double center, double radius) {
  return Interval(sub_down(center, radius), add_up(center, radius));
}

}  // namespace spiderweb

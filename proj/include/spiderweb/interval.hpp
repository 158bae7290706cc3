#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>

namespace spiderweb {

/// Directed rounding of the basic IEEE operations without touching the
/// global rounding mode. Each pair brackets the exact real result; the
/// error-free transformations (TwoSum, fma residuals) make the bracket a
/// single ulp wide only when the nearest-rounded result is inexact.
namespace rounding {

double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);

inline double next_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double next_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

}  // namespace rounding

class IntervalError : public std::domain_error {
 public:
  enum class Kind { DivisionByZero, NegativeSqrt, InvalidBounds };

  IntervalError(Kind kind, const std::string& what) : std::domain_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Closed interval [lo, hi] of doubles. Every arithmetic operation returns
/// an enclosure of the exact real result over all member pairs.
class Interval {
 public:
  constexpr Interval() = default;
  // Implicit on purpose: generic formulas write Scalar(2), and Eigen needs
  // Scalar(0) / Scalar(1).
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT(google-explicit-constructor)
  Interval(double lo, double hi);

  /// Enclosure of the integer p, exact whenever |p| < 2^53.
  static Interval from_int(std::int64_t p);
  /// Enclosure of the rational p/q.
  static Interval ratio(std::int64_t p, std::int64_t q);
  static Interval pi();
  /// Enclosure of cos(pi p / q) for the exact rational angle.
  static Interval cos_pi_ratio(std::int64_t p, std::int64_t q);

  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double mid() const;
  double width() const { return rounding::sub_up(hi_, lo_); }
  /// max |x| over the interval.
  double mag() const;
  /// min |x| over the interval.
  double mig() const;

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool certainly_positive() const { return lo_ > 0.0; }
  bool certainly_negative() const { return hi_ < 0.0; }
  bool is_point() const { return lo_ == hi_; }

  Interval operator-() const { return Interval(-hi_, -lo_, Unchecked{}); }
  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }

  friend Interval sqrt(const Interval& x);
  friend Interval square(const Interval& x);
  friend Interval abs(const Interval& x);
  /// Convex hull.
  friend Interval hull(const Interval& a, const Interval& b);

  // Ordering between intervals is only meaningful where it is certain.
  friend bool operator==(const Interval& a, const Interval& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }
  friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Interval& x);

 private:
  struct Unchecked {};
  constexpr Interval(double lo, double hi, Unchecked) : lo_(lo), hi_(hi) {}

  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Enclosure of [center - radius, center + radius].
Interval ball(double center, double radius);

}  // namespace spiderweb

namespace Eigen {

template <>
struct NumTraits<spiderweb::Interval> : GenericNumTraits<double> {
  using Real = spiderweb::Interval;
  using NonInteger = spiderweb::Interval;
  using Literal = spiderweb::Interval;
  using Nested = spiderweb::Interval;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 16
  };

  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

}  // namespace Eigen

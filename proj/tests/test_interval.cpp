#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <random>

#include "spiderweb/core.hpp"
#include "spiderweb/interval.hpp"
#include "support.hpp"

using namespace spiderweb;
using Big = boost::multiprecision::cpp_bin_float_100;

namespace {

bool encloses(const Interval& x, const Big& v) { return Big(x.lower()) <= v && v <= Big(x.upper()); }

/// No wider than two ulps of the larger endpoint.
bool tight(const Interval& x) {
  const double m = x.mag();
  return x.upper() - x.lower() <= 2.0 * (rounding::next_up(m) - m);
}

}  // namespace

TEST_CASE("interval examples") {
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  CHECK(Interval(1, 2) * Interval(-1, 1) == Interval(-2, 2));
  CHECK(sqrt(Interval(4, 9)) == Interval(2, 3));
  CHECK(Interval(1, 2) - Interval(3, 4) == Interval(-3, -1));
  CHECK(Interval(1, 2) / Interval(4, 8) == Interval(0.125, 0.5));
  CHECK(abs(Interval(-3, 2)) == Interval(0, 3));
  CHECK(square(Interval(-3, 2)) == Interval(0, 9));
  CHECK(hull(Interval(1, 2), Interval(5, 6)) == Interval(1, 6));
  CHECK(Interval(-3, 2).mag() == 3.0);
  CHECK(Interval(-3, 2).mig() == 0.0);
  CHECK(Interval(2, 3).mig() == 2.0);
}

TEST_CASE("interval errors") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const IntervalError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  CHECK(kind_of([] { (void)(Interval(1) / Interval(-1, 1)); }) == static_cast<int>(IntervalError::Kind::DivisionByZero));
  CHECK(kind_of([] { (void)(Interval(1) / Interval(0, 1)); }) == static_cast<int>(IntervalError::Kind::DivisionByZero));
  CHECK(kind_of([] { (void)sqrt(Interval(-2, -1)); }) == static_cast<int>(IntervalError::Kind::NegativeSqrt));
  CHECK(kind_of([] { (void)Interval(2, 1); }) == static_cast<int>(IntervalError::Kind::InvalidBounds));
  CHECK(kind_of([] { (void)Interval(0, NAN); }) == static_cast<int>(IntervalError::Kind::InvalidBounds));
}

TEST_CASE("outward rounding encloses 330-bit reference results") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  auto draw = [&] { return std::ldexp(mant(rng), expo(rng)); };
  for (int t = 0; t < 20000; ++t) {
    const double a = draw();
    const double b = draw();
    const Big A(a), B(b);
    CHECK(encloses(Interval(a) + Interval(b), A + B));
    CHECK(encloses(Interval(a) - Interval(b), A - B));
    const Interval p = Interval(a) * Interval(b);
    CHECK(encloses(p, A * B));
    CHECK(tight(p));
    if (b != 0.0) {
      const Interval q = Interval(a) / Interval(b);
      CHECK(encloses(q, A / B));
      CHECK(tight(q));
    }
    const Interval s = sqrt(Interval(std::abs(a)));
    CHECK(encloses(s, boost::multiprecision::sqrt(Big(std::abs(a)))));
    CHECK(tight(s));
  }
}

TEST_CASE("wide operands enclose every endpoint combination") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 2000; ++t) {
    double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
    if (a0 > a1) std::swap(a0, a1);
    if (b0 > b1) std::swap(b0, b1);
    const Interval A(a0, a1), B(b0, b1);
    for (double x : {a0, a1, 0.5 * (a0 + a1)}) {
      for (double y : {b0, b1, 0.5 * (b0 + b1)}) {
        CHECK(encloses(A * B, Big(x) * Big(y)));
        CHECK(encloses(A + B, Big(x) + Big(y)));
        if (B.lower() > 0 || B.upper() < 0) CHECK(encloses(A / B, Big(x) / Big(y)));
      }
    }
  }
}

TEST_CASE("cos(pi p/q) enclosures are rigorous and narrower than 1e-15 for ell <= 256") {
  const Big pi = boost::math::constants::pi<Big>();
  double widest = 0.0;
  for (int ell = 2; ell <= 256; ++ell) {
    for (int k = 0; k <= 3 * ell; ++k) {
      const Interval c = Interval::cos_pi_ratio(2 * k, ell);
      const Big ref = boost::multiprecision::cos(pi * 2 * k / ell);
      // Exact values (cos 2pi/3 = -1/2) come back as points; allow for the
      // reference's own last-digit error.
      if (!encloses(c, ref) && !(abs(ref - Big(c.lower())) < Big(1e-90))) FAIL("cos enclosure misses for k=" << k << " ell=" << ell);
      widest = std::max(widest, c.width());
    }
  }
  CHECK(widest < 1e-15);
  CHECK(Interval::cos_pi_ratio(0, 7) == Interval(1.0));
  CHECK(Interval::cos_pi_ratio(1, 2) == Interval(0.0));
  CHECK(Interval::cos_pi_ratio(7, 7) == Interval(-1.0));
  CHECK(Interval::cos_pi_ratio(-1, 3).contains(0.5));
}

TEST_CASE("pi enclosure") {
  const Big pi = boost::math::constants::pi<Big>();
  CHECK(encloses(Interval::pi(), pi));
  CHECK(Interval::pi().width() < 1e-15);
}

TEST_CASE("float evaluations lie inside interval evaluations") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto in = testing_support::random_instance(rng);
    const Eigen::VectorXd f = residual(in.params, in.radii);
    const IVector fi = residual(in.params, to_interval(in.radii));
    const Eigen::MatrixXd J = jacobian(in.params, in.radii);
    const IMatrix Ji = jacobian(in.params, to_interval(in.radii));
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      CHECK(fi(i).contains(f(i)));
      for (Eigen::Index j = 0; j < f.size(); ++j) CHECK(Ji(i, j).contains(J(i, j)));
    }
  }
}

TEST_CASE("sup norms") {
  IVector v(3);
  v << Interval(-3, 1), Interval(2), Interval(-1, 2.5);
  CHECK(norm_inf_upper(v) == 3.0);
  IMatrix m(2, 2);
  m << Interval(-1, 1), Interval(2), Interval(0.5), Interval(-0.25, 0);
  CHECK(matrix_norm_inf_upper(m) == 3.0);
}

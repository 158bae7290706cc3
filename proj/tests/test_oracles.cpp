// Checks against values computed outside this code base: 40-digit mpmath
// constants, a brute-force N-body sum, closed forms and a Boost root finder.
#include <doctest.h>

#include <boost/math/tools/roots.hpp>

#include "spiderweb/certify.hpp"
#include "spiderweb/core.hpp"
#include "spiderweb/solver.hpp"
#include "support.hpp"

using namespace spiderweb;
using namespace testing_support;

namespace {

struct HOracle {
  int ell;
  double zeta;
  double x_min;
  double h_min;
};

// mpmath, 40 digits: zeta_ell and the minimum of h_ell on [0, 1].
constexpr HOracle kOracle[] = {
    {2, 0.7071067811865475244, 1.0, 0.5},
    {3, 1.6329931618554520655, 1.0, 1.154700538379251529},
    {4, 2.7071067811865475244, 0.126772399933849, 1.6669269253944899238},
    {5, 3.8929959578709206552, 0.250786312178845, 1.4894072896880088846},
    {6, 5.1685270677881896875, 0.340006765429003, 1.2390389565453688828},
    {7, 6.5188594771924495419, 0.411157120596864, 0.92384354734449058834},
    {8, 7.9333586406920536358, 0.470282154287279, 0.5384145189648042721},
    {9, 9.4040328196685714497, 0.520354395124769, 0.077349338724713857556},
    {10, 10.924658059394226844, 0.563205118273566, -0.46393023464168865999},
    {11, 12.490250646492594007, 0.600135832763028, -1.0892467918106009512},
    {12, 14.096730298063698862, 0.632149147936966, -1.8017945716026586444},
    {13, 15.740695094999348461, 0.660048784502594, -2.60425257657029287},
    {14, 17.419265396487274224, 0.684490479960688, -3.4988796060301865041},
    {15, 19.129972203224014961, 0.706013191905013, -4.4875927618327971983},
    {16, 20.870675206209232983, 0.725061416172585, -5.5720313388990506375},
    {17, 22.63950127306629049, 0.742002622279835, -6.7536082039972646806},
    {18, 24.434797377062728816, 0.757141371229314, -8.0335508102685750194},
};

}  // namespace

TEST_CASE("zeta matches high-precision values and the interval enclosure contains them") {
  for (const auto& o : kOracle) {
    CAPTURE(o.ell);
    CHECK(rel_diff(zeta<double>(o.ell), o.zeta) < 1e-14);
    const Interval z = zeta_enclosure(o.ell);
    CHECK(z.lower() <= o.zeta);
    CHECK(o.zeta <= z.upper());
    CHECK(z.width() < 1e-12);
  }
}

TEST_CASE("h_ell minimum on [0,1] matches high-precision values") {
  for (const auto& o : kOracle) {
    CAPTURE(o.ell);
    const RingAngles<double> a(o.ell);
    CHECK(std::abs(h_ell(o.x_min, a) - o.h_min) < 1e-12);
    // The rigorous lower bound must not exceed the true minimum.
    CHECK(h_ell_lower_bound(o.ell, 1024) <= o.h_min);
  }
}

TEST_CASE("residual agrees with a brute-force sum over all bodies") {
  std::mt19937_64 rng(20241);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = random_instance(rng);
    CAPTURE(trial);
    const Eigen::VectorXd f = residual(in.params, in.radii);
    const Eigen::VectorXd g = brute_force_residual(in.params, in.radii);
    const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
    CHECK((f - g).lpNorm<Eigen::Infinity>() / scale < 1e-12);
  }
}

TEST_CASE("single ring closed form") {
  SpiderwebParams p = unit_params(1, 2);
  CHECK(solve_single_ring(p).radii(0) == doctest::Approx(std::pow(4.0, -1.0 / 3.0)).epsilon(1e-15));
  p.masses = {8.0};
  CHECK(solve_single_ring(p).radii(0) == doctest::Approx(2.0 * std::pow(4.0, -1.0 / 3.0)).epsilon(1e-15));
  p = unit_params(1, 4, 1.0);
  const double zeta4 = 2.0 + 1.0 / std::sqrt(2.0);
  CHECK(solve_single_ring(p).radii(0) == doctest::Approx(std::cbrt(zeta4 / std::pow(2.0, 1.5) + 1.0)).epsilon(1e-15));
}

TEST_CASE("closed-form central configuration residual is zero for the brute-force sum") {
  for (int ell = 2; ell <= 30; ++ell) {
    const Configuration c = solve_single_ring(unit_params(1, ell, 0.3));
    CHECK(std::abs(brute_force_residual(c.params, c.radii)(0)) < 1e-13);
  }
}

TEST_CASE("built configurations are central for the brute-force sum") {
  for (int ell : {2, 5, 12}) {
    SpiderwebParams p = unit_params(4, ell, 0.5);
    p.masses = {1.0, 0.5, 2.0, 0.75};
    const Configuration c = build_configuration(p);
    CHECK(brute_force_residual(p, c.radii).lpNorm<Eigen::Infinity>() < 1e-11);
  }
}

TEST_CASE("insertion radius agrees with Boost toms748") {
  const Configuration c = build_configuration(unit_params(3, 6));
  const RingAngles<double> a(6);
  for (int gap = 1; gap <= 3; ++gap) {
    CAPTURE(gap);
    const double rho = insertion_radius(c, InsertionGap{gap});
    const double lo = c.radii(gap - 1) * (1 + 1e-9);
    const double hi = gap < 3 ? c.radii(gap) * (1 - 1e-9) : 4.0 * c.radii(2);
    auto g = [&](double x) { return probe_lambda(c.params, c.radii, x, a) - c.params.lambda; };
    boost::uintmax_t iters = 200;
    const auto [x0, x1] = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    CHECK(std::abs(rho - 0.5 * (x0 + x1)) < 1e-10);
  }
}

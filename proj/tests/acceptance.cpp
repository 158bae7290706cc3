// One PASS/FAIL line per acceptance criterion. Exit status is 0 when the set
// of failing criteria equals the set given with --expect-fail (default none).
#include <boost/math/tools/roots.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "spiderweb/analysis.hpp"
#include "spiderweb/certify.hpp"
#include "spiderweb/core.hpp"
#include "spiderweb/solver.hpp"
#include "support.hpp"

using namespace spiderweb;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// --- 1 ---------------------------------------------------------------------
Outcome closed_form_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> ell_dist(2, 200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    SpiderwebParams p;
    p.ell = ell_dist(rng);
    p.m0 = u(rng) < 0.3 ? 0.0 : 3.0 * u(rng);
    p.masses = {0.01 + 5.0 * u(rng)};
    p.lambda = -(0.1 + 4.0 * u(rng));
    // zeta in extended precision with the library's cosines bypassed.
    long double z = 0.0L;
    for (int k = 1; k < p.ell; ++k) z += 1.0L / std::sqrt(1.0L - std::cos(2.0L * 3.141592653589793238462643383279503L * k / p.ell));
    const long double expect = std::cbrt((p.masses[0] * z / std::pow(2.0L, 1.5L) + p.m0) / -p.lambda);
    const double got = solve_single_ring(p).radii(0);
    worst = std::max(worst, static_cast<double>(std::abs((got - expect) / expect)));
  }
  const double secs = seconds_since(t0);
  o.detail << "max relative error " << worst << ", " << secs << " s";
  o.require(worst <= 1e-13, "relative error <= 1e-13");
  o.require(secs < 1.0, "runtime < 1 s");
  return o;
}

// --- 2 ---------------------------------------------------------------------
Outcome desk_scale_reproduction(bool spot_check) {
  Outcome o;
  const auto t0 = Clock::now();
  int failures = 0;
  int rows = 0;
  std::string first_failure;
  for (int n = 1; n <= 20; ++n) {
    for (int ell = 2; ell <= 40; ell += 2) {
      ++rows;
      try {
        const Configuration c = build_configuration(unit_params(n, ell));
        const Certificate cert = certify(c);
        if (!(cert.p_at_rho0 < 0.0)) throw std::runtime_error("p(rho0) not negative");
      } catch (const std::exception& e) {
        if (failures++ == 0) first_failure = "n=" + std::to_string(n) + " ell=" + std::to_string(ell) + ": " + e.what();
      }
    }
  }
  const double secs = seconds_since(t0);
  o.detail << rows << " pairs, " << failures << " failures, " << secs << " s";
  o.require(failures == 0, "0 failures" + (first_failure.empty() ? "" : " (" + first_failure + ")"));
  o.require(secs < 600.0, "runtime < 10 min");
  if (spot_check) {
    const auto t1 = Clock::now();
    try {
      const Configuration c = build_configuration(unit_params(100, 200));
      const Certificate cert = certify(c);
      o.detail << "; n=100 ell=200: residual " << c.residual_norm << ", rho0 " << cert.rho0 << ", " << seconds_since(t1)
               << " s";
    } catch (const std::exception& e) {
      o.require(false, std::string("n=100 ell=200 spot check: ") + e.what());
    }
  } else {
    o.detail << "; n=100 ell=200 spot check skipped (--no-spot-check)";
  }
  return o;
}

// --- 3 and 4 ---------------------------------------------------------------
Outcome derivative_oracles() {
  Outcome o;
  std::mt19937_64 rng(303);
  double worst_j = 0.0;
  double worst_h = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Instance in = random_instance(rng, 6, 12);
    const RingAngles<double> a(in.params.ell);
    const Eigen::Index n = in.radii.size();
    const Eigen::MatrixXd J = jacobian_phi_form(in.params, in.radii, a);
    const HessianTensor<double> H = hessian(in.params, in.radii, a);
    Eigen::MatrixXd Jfd(n, n);
    double herr = 0.0;
    double hscale = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      const double h = 1e-6 * in.radii(l);
      Eigen::VectorXd rp = in.radii, rm = in.radii;
      rp(l) += h;
      rm(l) -= h;
      const double step = rp(l) - rm(l);
      Jfd.col(l) = (residual(in.params, rp, a) - residual(in.params, rm, a)) / step;
      const Eigen::MatrixXd dJ = (jacobian(in.params, rp, a) - jacobian(in.params, rm, a)) / step;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          herr = std::max(herr, std::abs(H(i, j, l) - dJ(i, j)));
          hscale = std::max(hscale, std::abs(H(i, j, l)));
        }
      }
    }
    worst_j = std::max(worst_j, (J - Jfd).cwiseAbs().maxCoeff() / J.cwiseAbs().maxCoeff());
    worst_h = std::max(worst_h, herr / hscale);
  }
  o.detail << "50 instances, Jacobian rel " << worst_j << ", Hessian rel " << worst_h;
  o.require(worst_j <= 1e-6, "Jacobian within 1e-6");
  o.require(worst_h <= 1e-5, "Hessian within 1e-5");
  return o;
}

Outcome row_identity() {
  Outcome o;
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Instance in = random_instance(rng, 6, 12);
    const RingAngles<double> a(in.params.ell);
    const Eigen::MatrixXd J = jacobian_phi_form(in.params, in.radii, a);
    const Eigen::VectorXd margin = row_dominance_margin(in.params, in.radii, a);
    for (Eigen::Index i = 0; i < J.rows(); ++i) worst = std::max(worst, rel_diff(-J.row(i).sum(), margin(i)));
  }
  o.detail << "50 instances, max relative difference " << worst;
  o.require(worst <= 1e-10, "agreement 1e-10");
  return o;
}

// --- 5 ---------------------------------------------------------------------
Outcome h_ell_split() {
  Outcome o;
  for (int ell = 2; ell <= 9; ++ell) {
    const HCheckReport r = h_ell_check(ell);
    o.require(r.verified, "grid proof for ell=" + std::to_string(ell));
    if (ell <= 4) o.require(r.closed_form_verified.value_or(false), "closed form for ell=" + std::to_string(ell));
  }
  for (int ell = 10; ell <= 18; ++ell) {
    const HCheckReport r = h_ell_check(ell);
    o.require(!r.verified && r.witness_value && r.witness_value->certainly_negative(),
              "negative witness for ell=" + std::to_string(ell));
  }
  o.detail << "ell 2..9 verified, 10..18 negative witnesses;";
  constexpr double zeta_table[] = {10.9, 12.45, 14, 15.74, 17, 19.13, 20.8, 22, 24};
  constexpr double h_table[] = {-0.48, -1.1, -1.82, -2.61, -4, -4.5, -5.6, -6.8, -8.2};
  for (int ell = 10; ell <= 18; ++ell) {
    const Interval z = zeta_enclosure(ell);
    const double zt = zeta_table[ell - 10];
    if (!(z.lower() >= zt)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "zeta_%d >= %g: enclosure [%.17g, %.17g] lies below", ell, zt, z.lower(), z.upper());
      o.require(false, buf);
    }
    o.require(h_ell_exceeds(ell, h_table[ell - 10]), "min h_" + std::to_string(ell) + " > " + std::to_string(h_table[ell - 10]));
  }
  o.detail << " table bounds checked in interval arithmetic";
  return o;
}

// --- 6 ---------------------------------------------------------------------
Outcome uniqueness() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> mass(0.1, 3.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int instances = 0;
  int runs = 0;
  int converged = 0;
  double worst_ratio = 0.0;
  // Converged means run down to the rounding floor; the default 1e-12
  // residual tolerance leaves the iterate far outside a 1e-15 ball.
  ContinuationSettings tight;
  tight.newton_tol = 1e-300;
  for (int ell = 2; ell <= 9; ++ell) {
    for (int n = 2; n <= 4; ++n) {
      SpiderwebParams p = unit_params(n, ell, 0.0);
      for (double& m : p.masses) m = mass(rng);
      const Configuration c = build_configuration(p);
      const Certificate cert = certify(c);
      ++instances;
      for (int t = 0; t < 20; ++t) {
        ++runs;
        Eigen::VectorXd start(n);
        for (int i = 0; i < n; ++i) start(i) = c.radii(i) * (1.0 + 0.25 * u(rng));
        std::sort(start.data(), start.data() + n);
        try {
          const Configuration d = newton_solve(p, start, tight);
          ++converged;
          worst_ratio = std::max(worst_ratio, (d.radii - c.radii).lpNorm<Eigen::Infinity>() / (2.0 * cert.rho0));
        } catch (const SolverError&) {
        }
      }
    }
  }
  o.detail << instances << " instances, " << converged << "/" << runs
           << " multistart runs converged, max distance / (2 rho0) = " << worst_ratio;
  o.require(converged == runs, "every multistart run converges");
  o.require(worst_ratio <= 1.0, "all within 2 rho0 of the certified center");
  return o;
}

// --- 7 ---------------------------------------------------------------------
Outcome scaling() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> mass(0.2, 2.0);
  std::uniform_int_distribution<int> n_dist(1, 8);
  std::uniform_int_distribution<int> ell_dist(2, 24);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    SpiderwebParams p = unit_params(n_dist(rng), ell_dist(rng), t % 2 ? 0.0 : mass(rng));
    for (double& m : p.masses) m = mass(rng);
    SpiderwebParams q = p;
    for (double& m : q.masses) m *= 8.0;
    q.m0 *= 8.0;
    const Configuration a = build_configuration(p);
    const Configuration b = build_configuration(q);
    worst = std::max(worst, ((b.radii - 2.0 * a.radii).array().abs() / (2.0 * a.radii.array())).maxCoeff());
  }
  o.detail << "20 instances, max relative deviation from radii x2: " << worst;
  o.require(worst <= 1e-9, "relative 1e-9");
  return o;
}

// --- 8 ---------------------------------------------------------------------
Outcome restricted_insertion() {
  Outcome o;
  const Configuration c = build_configuration(unit_params(3, 6, 0.3));
  const Certificate cert = certify(c);
  const RingAngles<double> a(6);
  auto lam = [&](double x) { return probe_lambda(c.params, c.radii, x, a); };
  double worst = 0.0;
  for (int gap = 1; gap <= 3; ++gap) {
    const double lo = c.radii(gap - 1);
    const double hi = gap < 3 ? c.radii(gap) : 4.0 * c.radii(2);
    double prev = -INFINITY;
    bool monotone = true;
    for (int k = 1; k <= 100; ++k) {
      const double v = lam(lo + (hi - lo) * k / 101.0);
      monotone = monotone && v > prev;
      prev = v;
    }
    o.require(monotone, "strictly increasing in gap " + std::to_string(gap));
    const double rho = insertion_radius(c, InsertionGap{gap});
    boost::uintmax_t iters = 300;
    auto g = [&](double x) { return lam(x) - c.params.lambda; };
    const auto [x0, x1] = boost::math::tools::toms748_solve(g, lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo),
                                                            boost::math::tools::eps_tolerance<double>(52), iters);
    worst = std::max(worst, std::abs(rho - 0.5 * (x0 + x1)));
  }
  o.detail << "certified (rho0 " << cert.rho0 << "), 3 gaps x 100 samples monotone, bisection vs toms748 max |diff| "
           << worst;
  o.require(worst <= 1e-10, "root agreement 1e-10");
  return o;
}

// --- 9 ---------------------------------------------------------------------
Outcome qualitative_profiles() {
  Outcome o;
  auto profile = [](int ell) { return spacing_profile(build_configuration(unit_params(20, ell))); };
  const SpacingProfile s2 = profile(2);
  bool increasing = true;
  for (Eigen::Index i = 0; i + 1 < s2.a.size(); ++i) increasing = increasing && s2.a(i + 1) > s2.a(i);
  o.require(increasing, "a_i strictly increasing at ell=2");
  const SpacingProfile s40 = profile(40);
  o.require(s40.i_star == 0, "i_star = 1 at ell=40 (got " + std::to_string(s40.i_star + 1) + ")");
  for (int ell : {2, 6, 40}) {
    const SpacingProfile s = profile(ell);
    o.require(s.convex, "convex at ell=" + std::to_string(ell));
    o.detail << "ell=" << ell << " min second difference " << s.min_second_difference << "; ";
  }
  double prev = INFINITY;
  o.detail << "b(ell):";
  for (int ell : {2, 6, 12, 24, 40}) {
    const double b = profile(ell).b;
    o.detail << ' ' << b;
    o.require(b < prev, "b decreasing at ell=" + std::to_string(ell));
    prev = b;
  }
  return o;
}

// --- 10 --------------------------------------------------------------------
Outcome soundness_drill() {
  Outcome o;
  const double corruption = 1e-3;
  int refused = 0;
  int large = 0;
  for (int n : {1, 3, 8}) {
    for (int ell : {2, 7, 20}) {
      const Configuration c = build_configuration(unit_params(n, ell));
      certify(c);
      Configuration bad = c;
      bad.radii(0) += corruption;
      ContinuationSettings s;
      s.newton_tol = 1e-300;
      const Configuration truth = newton_solve(c.params, bad.radii, s);
      try {
        const Certificate cert = certify(bad);
        ++large;
        o.require(cert.rho0 >= corruption, "rho0 >= corruption when certifying a corrupted center");
        o.require((truth.radii - bad.radii).lpNorm<Eigen::Infinity>() <= cert.rho0,
                  "true solution inside the claimed ball");
      } catch (const CertificationFailed&) {
        ++refused;
      }
    }
  }
  o.detail << refused << " corrupted centers refused, " << large << " certified with a ball covering the truth";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  bool spot_check = true;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--expect-fail") == 0 && k + 1 < argc) {
      std::stringstream ss(argv[++k]);
      for (std::string item; std::getline(ss, item, ',');) expected.insert(std::stoi(item));
    } else if (std::strcmp(argv[k], "--no-spot-check") == 0) {
      spot_check = false;
    } else {
      std::fprintf(stderr, "usage: %s [--expect-fail 5,...] [--no-spot-check]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, closed_form_oracle},
      {2, [&] { return desk_scale_reproduction(spot_check); }},
      {3, derivative_oracles},
      {4, row_identity},
      {5, h_ell_split},
      {6, uniqueness},
      {7, scaling},
      {8, restricted_insertion},
      {9, qualitative_profiles},
      {10, soundness_drill},
  };

  std::set<int> failed;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) failed.insert(id);
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
  }
  if (failed == expected) {
    if (!expected.empty()) std::printf("failing criteria match the expected set\n");
    return 0;
  }
  std::printf("failing criteria differ from the expected set\n");
  return 1;
}

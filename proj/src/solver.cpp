#include "spiderweb/solver.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "spiderweb/core.hpp"

namespace spiderweb {

namespace {

constexpr int kMaxHalvings = 10;
constexpr int kFastNewtonIterations = 3;
constexpr int kMaxBisections = 400;
constexpr int kMaxBracketDoublings = 60;

double sup_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

double rounding_floor(const Eigen::MatrixXd& J, const Eigen::VectorXd& r) {
  Eigen::VectorXd ulp(r.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) ulp(j) = std::nextafter(r(j), HUGE_VAL) - r(j);
  return (J.cwiseAbs() * ulp).maxCoeff();
}

SpiderwebParams with_mass(SpiderwebParams params, Eigen::Index ring, double mass) {
  params.masses[static_cast<std::size_t>(ring)] = mass;
  return params;
}

}  // namespace

void ContinuationSettings::validate() const {
  if (!(newton_tol > 0.0)) throw ValidationError("newton_tol must be positive");
  if (newton_max_iter < 1) throw ValidationError("newton_max_iter must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) throw ValidationError("step_shrink must lie in (0, 1)");
  if (!(step_grow > 1.0)) throw ValidationError("step_grow must exceed 1");
  if (mass_step_init < 0.0) throw ValidationError("mass_step_init must be nonnegative");
  if (bisect_tol < 0.0) throw ValidationError("bisect_tol must be nonnegative");
  if (max_mass_steps < 1) throw ValidationError("max_mass_steps must be positive");
}

Configuration solve_single_ring(const SpiderwebParams& params) {
  params.validate();
  if (params.n != 1) throw ValidationError("solve_single_ring needs n = 1");
  const RingAngles<double> angles(params.ell);
  const double numerator = params.masses[0] * angles.zeta() / (2.0 * std::sqrt(2.0)) + params.m0;
  if (!(numerator > 0.0)) throw ValidationError("a single massless ring without central mass has no equilibrium");
  Eigen::VectorXd r(1);
  r(0) = std::cbrt(numerator / -params.lambda);
  return Configuration{params, r, sup_norm(residual(params, r, angles))};
}

Configuration newton_solve(const SpiderwebParams& params, const Eigen::VectorXd& initial_radii,
                           const ContinuationSettings& settings, NewtonTrace* trace) {
  settings.validate();
  require_in_cone(initial_radii);
  const RingAngles<double> angles(params.ell);

  Eigen::VectorXd r = initial_radii;
  Eigen::VectorXd f = residual(params, r, angles);
  double norm = sup_norm(f);
  NewtonTrace local;
  NewtonTrace& tr = trace ? *trace : local;
  tr = NewtonTrace{};
  tr.residual_norms.push_back(norm);

  double floor = 0.0;
  for (int iter = 0; iter < settings.newton_max_iter; ++iter) {
    if (norm <= settings.newton_tol) return Configuration{params, r, norm, floor};

    const Eigen::MatrixXd J = jacobian(params, r, angles);
    floor = rounding_floor(J, r);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const double rcond = lu.rcond();
    if (!std::isfinite(rcond) || rcond < 1e-15) {
      throw SolverError(SolverError::Kind::SingularJacobian, "Jacobian is numerically singular (rcond " + std::to_string(rcond) + ")");
    }
    const Eigen::VectorXd step = lu.solve(f);
    if (!step.allFinite()) throw SolverError(SolverError::Kind::SingularJacobian, "Newton step is not finite");

    bool accepted = false;
    double alpha = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h, alpha *= 0.5) {
      const Eigen::VectorXd trial = r - alpha * step;
      // Leaving the cone counts as a rejected step.
      if (!in_cone(trial)) continue;
      const Eigen::VectorXd ft = residual(params, trial, angles);
      const double nt = sup_norm(ft);
      if (nt < norm) {
        r = trial;
        f = ft;
        norm = nt;
        accepted = true;
        break;
      }
    }
    tr.iterations = iter + 1;
    if (!accepted) {
      // Stuck at the rounding floor: no double vector does measurably better.
      if (norm <= std::max(settings.newton_tol, floor)) return Configuration{params, r, norm, floor};
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3g", norm);
      throw SolverError(SolverError::Kind::NewtonDiverged, std::string("no damped Newton step reduces the residual (||f|| = ") + buf + ")");
    }
    tr.residual_norms.push_back(norm);
  }
  if (norm <= std::max(settings.newton_tol, floor)) return Configuration{params, r, norm, floor};
  throw SolverError(SolverError::Kind::NewtonDiverged, "Newton did not reach tolerance in " +
                                                           std::to_string(settings.newton_max_iter) + " iterations");
}

double insertion_radius(const Configuration& config, InsertionGap gap, const ContinuationSettings& settings) {
  settings.validate();
  const Eigen::VectorXd& r = config.radii;
  const auto n = static_cast<int>(r.size());
  if (gap.index < 0 || gap.index > n) throw ValidationError("insertion gap index out of range");
  require_in_cone(r);
  const RingAngles<double> angles(config.params.ell);
  const double target = config.params.lambda;
  auto lam = [&](double rho) { return probe_lambda(config.params, r, rho, angles); };

  // lambda_probe increases strictly across a gap, from -inf at the inner
  // ring to +inf at the outer ring (or 0- at infinity). The open endpoints
  // stand for those limits and are never evaluated.
  double lo = 0.0;
  double hi = 0.0;
  if (gap.index == 0) {
    hi = r(0);
    lo = r(0) * 0x1p-40;
    if (lam(lo) >= target) {
      throw SolverError(SolverError::Kind::BracketFailed, "no sign change in the innermost gap (0, r_1)");
    }
  } else if (gap.index == n) {
    lo = r(n - 1);
    hi = 2.0 * lo;
    int doublings = 0;
    while (lam(hi) <= target) {
      if (++doublings > kMaxBracketDoublings) {
        throw SolverError(SolverError::Kind::BracketFailed, "outer bracket did not reach lambda up to 2^60 r_n");
      }
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = r(gap.index - 1);
    hi = r(gap.index);
  }

  const double tol = settings.bisect_tol > 0.0 ? settings.bisect_tol : 1e-13 * r(n - 1);
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol || mid <= lo || mid >= hi) return mid;
    if (lam(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw SolverError(SolverError::Kind::BracketFailed, "bisection did not converge");
}

Insertion insert_zero_mass_ring(const Configuration& config, InsertionGap gap, const ContinuationSettings& settings) {
  const double rho = insertion_radius(config, gap, settings);
  const auto n = config.radii.size();
  const Eigen::Index pos = gap.index;

  Insertion out;
  out.ring = pos;
  out.params = config.params;
  out.params.n = static_cast<int>(n + 1);
  out.params.allow_massless_rings = true;
  out.params.masses.insert(out.params.masses.begin() + pos, 0.0);
  out.radii.resize(n + 1);
  out.radii << config.radii.head(pos), rho, config.radii.tail(n - pos);
  return out;
}

Configuration continue_mass(const SpiderwebParams& params, const Eigen::VectorXd& radii, Eigen::Index ring,
                            double target_mass, const ContinuationSettings& settings) {
  settings.validate();
  if (ring < 0 || ring >= radii.size()) throw ValidationError("ring index out of range");
  if (!std::isfinite(target_mass) || target_mass < 0.0) throw ValidationError("target mass must be nonnegative");
  if (!in_cone(radii)) throw SolverError(SolverError::Kind::OrderingViolated, "continuation start is not ordered", static_cast<int>(ring));

  const double start_mass = params.masses[static_cast<std::size_t>(ring)];
  if (target_mass == start_mass) {
    return Configuration{params, radii, sup_norm(residual(params, radii, RingAngles<double>(params.ell)))};
  }

  const double span = target_mass - start_mass;
  const double initial_step = settings.mass_step_init > 0.0 ? settings.mass_step_init : std::abs(span) / 8.0;
  const double min_step = initial_step * 1e-12;
  const double direction = span > 0 ? 1.0 : -1.0;

  SpiderwebParams work = params;
  work.allow_massless_rings = true;
  Configuration current = newton_solve(with_mass(work, ring, start_mass), radii, settings);
  double mass = start_mass;
  double step = initial_step;

  for (int attempts = 0; mass != target_mass; ++attempts) {
    if (attempts == settings.max_mass_steps) {
      throw SolverError(SolverError::Kind::ContinuationStalled,
                        "mass continuation used its budget of " + std::to_string(attempts) + " steps at m = " + std::to_string(mass),
                        static_cast<int>(ring), mass);
    }
    const double remaining = std::abs(target_mass - mass);
    const double next = step >= remaining ? target_mass : mass + direction * step;
    const SpiderwebParams trial_params = with_mass(work, ring, next);
    NewtonTrace trace;
    try {
      Configuration trial = newton_solve(trial_params, current.radii, settings, &trace);
      if (!in_cone(trial.radii)) {
        throw SolverError(SolverError::Kind::OrderingViolated, "continuation left the ordered cone", static_cast<int>(ring), mass);
      }
      current = std::move(trial);
      mass = next;
      if (trace.iterations <= kFastNewtonIterations) step *= settings.step_grow;
    } catch (const SolverError& e) {
      if (e.kind() == SolverError::Kind::OrderingViolated) throw;
      step *= settings.step_shrink;
      if (step < min_step) {
        throw SolverError(SolverError::Kind::ContinuationStalled,
                          "mass continuation stalled at m = " + std::to_string(mass) + ": " + e.what(),
                          static_cast<int>(ring), mass);
      }
    }
  }
  current.params = with_mass(params, ring, target_mass);
  return current;
}

namespace {

// Massless rings exert no force, so the massive rings form a closed problem.
// Each massless ring is then the unique insertion root in its gap.
Configuration build_with_massless(const SpiderwebParams& params, const ContinuationSettings& settings) {
  std::vector<int> massive;
  for (int k = 0; k < params.n; ++k) {
    if (params.masses[static_cast<std::size_t>(k)] > 0.0) massive.push_back(k);
  }
  if (massive.empty()) throw ValidationError("at least one ring must carry mass");
  SpiderwebParams core = params;
  core.n = static_cast<int>(massive.size());
  core.masses.clear();
  for (int k : massive) core.masses.push_back(params.masses[static_cast<std::size_t>(k)]);
  const Configuration base = build_configuration(core, settings);

  Eigen::VectorXd radii(params.n);
  int gap = 0;
  int last_gap = -1;
  for (int k = 0; k < params.n; ++k) {
    if (gap < core.n && massive[static_cast<std::size_t>(gap)] == k) {
      radii(k) = base.radii(gap++);
      continue;
    }
    if (gap == last_gap) {
      throw SolverError(SolverError::Kind::BracketFailed,
                        "massless rings " + std::to_string(k) + " and " + std::to_string(k + 1) +
                            " would share one insertion root",
                        k);
    }
    last_gap = gap;
    try {
      radii(k) = insertion_radius(base, InsertionGap{gap}, settings);
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), "placing massless ring " + std::to_string(k + 1) + ": " + e.what(), k);
    }
  }
  Configuration full{params, radii, sup_norm(residual(params, radii, RingAngles<double>(params.ell)))};
  if (!full.converged(settings.newton_tol)) full = newton_solve(params, radii, settings);
  return full;
}

}  // namespace

Configuration build_configuration(const SpiderwebParams& params, const ContinuationSettings& settings) {
  params.validate();
  settings.validate();
  if (params.n > 1 && std::any_of(params.masses.begin(), params.masses.end(), [](double m) { return m == 0.0; })) {
    return build_with_massless(params, settings);
  }

  SpiderwebParams first = params;
  first.n = 1;
  first.masses.assign(1, params.masses[0]);
  Configuration current = solve_single_ring(first);

  for (int k = 1; k < params.n; ++k) {
    try {
      const Insertion ins = insert_zero_mass_ring(current, InsertionGap{k}, settings);
      current = continue_mass(ins.params, ins.radii, ins.ring, params.masses[static_cast<std::size_t>(k)], settings);
      if (!current.converged(settings.newton_tol)) current = newton_solve(current.params, current.radii, settings);
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), "construction failed at ring " + std::to_string(k + 1) + ": " + e.what(), k,
                        e.last_mass());
    }
  }
  current.params = params;
  return current;
}

}  // namespace spiderweb

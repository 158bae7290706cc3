#include "spiderweb/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace spiderweb {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SpacingProfile spacing_profile(const Configuration& config, double convexity_tol) {
  if (!(convexity_tol >= 0.0)) throw ValidationError("convexity_tol must be nonnegative");
  const Eigen::VectorXd& r = config.radii;
  require_in_cone(r);
  SpacingProfile out;
  out.min_second_difference = std::numeric_limits<double>::infinity();
  const Eigen::Index n = r.size();
  if (n < 2) {
    out.a.resize(0);
    return out;
  }
  out.a = (r.tail(n - 1) - r.head(n - 1)) / r(0);
  out.b = (r(n - 1) - r(0)) / r(0);
  Eigen::Index best = 0;
  out.a.maxCoeff(&best);
  out.i_star = static_cast<int>(best);
  for (Eigen::Index i = 1; i + 1 < out.a.size(); ++i) {
    const double d2 = out.a(i + 1) - 2.0 * out.a(i) + out.a(i - 1);
    out.min_second_difference = std::min(out.min_second_difference, d2);
  }
  out.convex = !(out.min_second_difference < -convexity_tol);
  return out;
}

MassProfile mass_profile(const Configuration& config, const Eigen::VectorXd& eta_grid) {
  const Eigen::VectorXd& r = config.radii;
  require_in_cone(r);
  for (Eigen::Index k = 0; k + 1 < eta_grid.size(); ++k) {
    if (!(eta_grid(k) < eta_grid(k + 1))) throw ValidationError("eta grid must be strictly increasing");
  }
  const auto& m = config.params.masses;
  if (m.size() != static_cast<std::size_t>(r.size())) throw ValidationError("mass count does not match radii");

  std::vector<double> prefix(m.size() + 1, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) prefix[i + 1] = prefix[i] + m[i];

  MassProfile out;
  out.eta_grid = eta_grid;
  out.M.resize(eta_grid.size());
  out.chi.resize(static_cast<std::size_t>(eta_grid.size()));
  for (Eigen::Index k = 0; k < eta_grid.size(); ++k) {
    const auto chi = std::upper_bound(r.data(), r.data() + r.size(), eta_grid(k)) - r.data();
    out.chi[static_cast<std::size_t>(k)] = static_cast<int>(chi);
    out.M(k) = config.params.ell * prefix[static_cast<std::size_t>(chi)];
  }
  return out;
}

Eigen::VectorXd default_eta_grid(const Configuration& config, int points) {
  if (points < 2) throw ValidationError("eta grid needs at least 2 points");
  require_in_cone(config.radii);
  return Eigen::VectorXd::LinSpaced(points, 0.0, 1.25 * config.radii(config.radii.size() - 1));
}

ScanRow scan_one(const ScanOptions& options, int n, int ell) {
  ScanRow row;
  row.n = n;
  row.ell = ell;
  try {
    row.params.n = n;
    row.params.ell = ell;
    row.params.m0 = options.m0;
    row.params.lambda = options.lambda;
    row.params.masses = options.masses.masses(n, ell);
    row.params.allow_massless_rings = options.masses.allows_massless();
    const Configuration config = build_configuration(row.params, options.settings);
    row.radii = config.radii;
    row.residual_norm = config.residual_norm;
    row.spacing = spacing_profile(config, options.convexity_tol);
    if (options.certify) row.certificate = certify(config);
  } catch (const ValidationError& e) {
    row.status = "validation";
    row.message = e.what();
  } catch (const SolverError& e) {
    row.status = std::string("solver:") + to_string(e.kind());
    row.message = e.what();
  } catch (const CertificationFailed& e) {
    row.status = std::string("certify:") + to_string(e.reason());
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  return row;
}

std::vector<ScanRow> scan(const ScanOptions& options, std::ostream* csv) {
  if (options.ns.empty() || options.ells.empty()) throw ValidationError("scan needs at least one n and one ell");
  for (int n : options.ns) {
    if (n < 1) throw ValidationError("scan ring counts must be positive");
  }
  for (int ell : options.ells) {
    if (ell < 2) throw ValidationError("scan spoke counts must be at least 2");
  }
  options.settings.validate();

  std::vector<std::pair<int, int>> work;
  for (int n : options.ns) {
    for (int ell : options.ells) work.emplace_back(n, ell);
  }
  const int n_max = *std::max_element(options.ns.begin(), options.ns.end());
  if (csv) write_csv_header(*csv, n_max);

  std::vector<ScanRow> rows(work.size());
  std::vector<char> done(work.size(), 0);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < work.size(); k = next++) {
      ScanRow row = scan_one(options, work[k].first, work[k].second);
      std::lock_guard lock(mutex);
      rows[k] = std::move(row);
      done[k] = 1;
      ready.notify_all();
    }
  };

  const int jobs = std::clamp<int>(options.jobs, 1, static_cast<int>(work.size()));
  std::vector<std::jthread> threads;
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);

  // Stream finished rows in work order while later ones are still running.
  for (std::size_t k = 0; k < work.size(); ++k) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return done[k] != 0; });
    if (csv) {
      write_csv_row(*csv, rows[k], options.masses.text(), n_max);
      csv->flush();
    }
  }
  return rows;
}

void write_csv_header(std::ostream& os, int n_max, int a_columns) {
  os << "n,ell,lambda,m0,mass_spec";
  for (int i = 1; i <= n_max; ++i) os << ",r_" << i;
  os << ",rho0,Y0,Z0,Z2,b,i_star,convex,status";
  for (int i = 1; i <= a_columns; ++i) os << ",a_" << i;
  os << '\n';
}

void write_csv_row(std::ostream& os, const ScanRow& row, const std::string& mass_spec, int n_max, int a_columns) {
  // Mass lists contain commas.
  std::string spec = mass_spec;
  if (spec.find_first_of(",\"") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : spec) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    spec = quoted + "\"";
  }
  os << row.n << ',' << row.ell << ',' << format_real(row.params.lambda) << ',' << format_real(row.params.m0) << ','
     << spec;
  for (int i = 0; i < n_max; ++i) {
    os << ',';
    if (i < row.radii.size()) os << format_real(row.radii(i));
  }
  const auto& c = row.certificate;
  os << ',' << (c ? format_real(c->rho0) : "") << ',' << (c ? format_real(c->Y0) : "") << ','
     << (c ? format_real(c->Z0) : "") << ',' << (c ? format_real(c->Z2) : "");
  const auto& s = row.spacing;
  const bool has_spacing = s && s->i_star >= 0;
  os << ',' << (s ? format_real(s->b) : "") << ',' << (has_spacing ? std::to_string(s->i_star + 1) : "") << ','
     << (s ? (s->convex ? "true" : "false") : "") << ',' << row.status;
  for (int i = 0; i < a_columns; ++i) {
    os << ',';
    if (s && i < s->a.size()) os << format_real(s->a(i));
  }
  os << '\n';
}

}  // namespace spiderweb

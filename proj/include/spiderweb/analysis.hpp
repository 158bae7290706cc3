#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spiderweb/certify.hpp"
#include "spiderweb/masses.hpp"
#include "spiderweb/params.hpp"
#include "spiderweb/solver.hpp"

namespace spiderweb {

struct SpacingProfile {
  /// a_i = (r_{i+1} - r_i) / r_1
  Eigen::VectorXd a;
  /// (r_n - r_1) / r_1
  double b = 0.0;
  /// Zero-based index of the largest a_i, -1 when n < 2.
  int i_star = -1;
  bool convex = true;
  /// min_i (a_{i+1} - 2 a_i + a_{i-1}), +inf when n < 4.
  double min_second_difference = 0.0;
};

SpacingProfile spacing_profile(const Configuration& config, double convexity_tol = 1e-9);

struct MassProfile {
  Eigen::VectorXd eta_grid;
  /// ell * sum_{i <= chi(eta)} m_i
  Eigen::VectorXd M;
  /// #{ i : r_i <= eta }
  std::vector<int> chi;
};

MassProfile mass_profile(const Configuration& config, const Eigen::VectorXd& eta_grid);

/// `points` equally spaced radii on [0, 1.25 r_n].
Eigen::VectorXd default_eta_grid(const Configuration& config, int points = 512);

struct ScanOptions {
  std::vector<int> ns;
  std::vector<int> ells;
  MassSpec masses = MassSpec::parse("equal:1");
  double m0 = 0.0;
  double lambda = -1.0;
  ContinuationSettings settings;
  double convexity_tol = 1e-9;
  bool certify = true;
  int jobs = 1;
};

struct ScanRow {
  int n = 0;
  int ell = 0;
  SpiderwebParams params;
  Eigen::VectorXd radii;
  double residual_norm = 0.0;
  std::optional<Certificate> certificate;
  std::optional<SpacingProfile> spacing;
  /// "ok", or the failure class such as "solver:NewtonDiverged".
  std::string status = "ok";
  std::string message;
};

/// Builds, certifies and profiles one (n, ell) pair. Failures end up in
/// `status`/`message`; nothing is thrown for per-row problems.
ScanRow scan_one(const ScanOptions& options, int n, int ell);

/// All pairs in n-major order. Rows are computed on `options.jobs` threads
/// and, when `csv` is given, streamed to it in that same order.
std::vector<ScanRow> scan(const ScanOptions& options, std::ostream* csv = nullptr);

/// Scan CSV columns. `a_columns` > 0 appends a_1..a_{a_columns}.
void write_csv_header(std::ostream& os, int n_max, int a_columns = 0);
void write_csv_row(std::ostream& os, const ScanRow& row, const std::string& mass_spec, int n_max, int a_columns = 0);

/// 17 significant digits: enough to round-trip any double.
std::string format_real(double x);

}  // namespace spiderweb

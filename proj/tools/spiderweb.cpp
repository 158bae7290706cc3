#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spiderweb/analysis.hpp"
#include "spiderweb/certify.hpp"
#include "spiderweb/core.hpp"
#include "spiderweb/document.hpp"
#include "spiderweb/masses.hpp"
#include "spiderweb/solver.hpp"

namespace sw = spiderweb;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kValidation = 2, kSolver = 3, kCertification = 4 };

int report(int code, const std::string& error, const std::string& kind, const std::string& message) {
  json j;
  j["error"] = error;
  if (!kind.empty()) j["kind"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << '\n';
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sw::ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sw::ValidationError("cannot write " + path);
  out << text;
}

/// "2,4,8", "2:40" or "2:40:2" (inclusive).
std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw sw::ValidationError("bad integer '" + s + "' in " + what);
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3) throw sw::ValidationError(what + " range must be start:stop[:step]");
    const int start = to_int(parts[0]);
    const int stop = to_int(parts[1]);
    const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
    if (step <= 0 || stop < start) throw sw::ValidationError(what + " range is empty");
    for (int v = start; v <= stop; v += step) out.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  }
  if (out.empty()) throw sw::ValidationError(what + " list is empty");
  return out;
}

struct SolveArgs {
  int n = 1;
  int ell = 2;
  double m0 = 0.0;
  std::string masses = "equal:1";
  double lambda = -1.0;
  double tol = 1e-12;
  double mass_step = 0.0;
  int max_iter = 50;
  int max_mass_steps = 100000;
  bool certify = false;
  std::string out = "-";
};

struct CertifyArgs {
  std::string input;
  std::string rho_star = "auto";
  std::string out;
};

struct ScanArgs {
  std::string ns = "1:20";
  std::string ells = "2:40:2";
  std::string masses = "equal:1";
  double m0 = 0.0;
  double lambda = -1.0;
  double tol = 1e-12;
  double convexity_tol = 1e-9;
  bool no_certify = false;
  int jobs = 1;
  std::string out = "-";
};

struct AnalyzeArgs {
  std::string input;
  std::string csv = "-";
  std::string svg;
  std::string mass_csv;
  int eta_points = 512;
  double convexity_tol = 1e-9;
};

struct HCheckArgs {
  std::string ells;
  int grid = 0;
};

sw::ContinuationSettings settings_from(double tol, double mass_step, int max_iter, int max_mass_steps = 100000) {
  sw::ContinuationSettings s;
  s.max_mass_steps = max_mass_steps;
  s.newton_tol = tol;
  s.mass_step_init = mass_step;
  s.newton_max_iter = max_iter;
  s.validate();
  return s;
}

json provenance(const std::string& command, const sw::ContinuationSettings* settings) {
  json p;
  p["tool"] = "spiderweb";
  p["version"] = sw::kToolVersion;
  p["command"] = command;
  if (settings) p["settings"] = sw::to_json(*settings);
  return p;
}

int run_solve(const SolveArgs& a) {
  const sw::MassSpec spec = sw::MassSpec::parse(a.masses);
  sw::SpiderwebParams params;
  params.n = a.n;
  params.ell = a.ell;
  params.m0 = a.m0;
  params.lambda = a.lambda;
  if (spec.kind() == sw::MassSpec::Kind::List && spec.values().size() != static_cast<std::size_t>(a.n)) {
    throw sw::ValidationError("expected " + std::to_string(a.n) + " ring masses, got " + std::to_string(spec.values().size()));
  }
  params.masses = spec.masses(a.n, a.ell);
  params.allow_massless_rings = spec.allows_massless();
  params.validate();
  const sw::ContinuationSettings settings = settings_from(a.tol, a.mass_step, a.max_iter, a.max_mass_steps);

  const sw::Configuration config = sw::build_configuration(params, settings);
  sw::SolutionDocument doc;
  doc.params = params;
  doc.mass_spec = a.masses;
  doc.radii = config.radii;
  doc.residual_norm = config.residual_norm;
  doc.provenance = provenance("solve", &settings);
  if (!config.converged(a.tol)) {
    return report(kSolver, "SolverError", "NewtonDiverged", "residual " + sw::format_real(config.residual_norm) + " above tol");
  }
  if (a.certify) doc.certificate = sw::certify(config);
  write_output(a.out, sw::emit_document(doc));
  return kOk;
}

int run_certify(const CertifyArgs& a) {
  sw::SolutionDocument doc = sw::parse_document(read_file(a.input));
  std::optional<double> rho_star;
  if (a.rho_star != "auto") rho_star = sw::parse_real(json(a.rho_star), "rho-star");
  doc.certificate = sw::certify(doc.configuration(), rho_star);
  doc.provenance["certified_by"] = provenance("certify", nullptr);
  write_output(a.out.empty() ? a.input : a.out, sw::emit_document(doc));
  return kOk;
}

int exit_code_for(const std::string& status) {
  if (status == "ok") return kOk;
  if (status.rfind("solver", 0) == 0) return kSolver;
  if (status.rfind("certify", 0) == 0) return kCertification;
  return kValidation;
}

int run_scan(const ScanArgs& a) {
  sw::ScanOptions opt;
  opt.ns = parse_int_list(a.ns, "--n");
  opt.ells = parse_int_list(a.ells, "--ell");
  opt.masses = sw::MassSpec::parse(a.masses);
  opt.m0 = a.m0;
  opt.lambda = a.lambda;
  opt.settings = settings_from(a.tol, 0.0, 50);
  opt.convexity_tol = a.convexity_tol;
  opt.certify = !a.no_certify;
  opt.jobs = a.jobs;
  if (const char* env = std::getenv("SPIDERWEB_JOBS"); env && *env) {
    const std::vector<int> j = parse_int_list(env, "SPIDERWEB_JOBS");
    if (j.size() != 1 || j[0] < 1) throw sw::ValidationError("SPIDERWEB_JOBS must be a positive integer");
    opt.jobs = j[0];
  }
  if (opt.jobs < 1) throw sw::ValidationError("--jobs must be positive");

  std::vector<sw::ScanRow> rows;
  if (a.out.empty() || a.out == "-") {
    rows = sw::scan(opt, &std::cout);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw sw::ValidationError("cannot write " + a.out);
    rows = sw::scan(opt, &out);
  }
  // Failed rows do not stop the scan; the first one decides the exit code.
  for (const auto& row : rows) {
    if (row.status != "ok") {
      return report(exit_code_for(row.status), "ScanRowFailed", row.status,
                    "n=" + std::to_string(row.n) + " ell=" + std::to_string(row.ell) + ": " + row.message);
    }
  }
  return kOk;
}

int run_analyze(const AnalyzeArgs& a) {
  const sw::SolutionDocument doc = sw::parse_document(read_file(a.input));
  const sw::Configuration config = doc.configuration();
  sw::ScanRow row;
  row.n = doc.params.n;
  row.ell = doc.params.ell;
  row.params = doc.params;
  row.radii = doc.radii;
  row.residual_norm = doc.residual_norm;
  row.certificate = doc.certificate;
  row.spacing = sw::spacing_profile(config, a.convexity_tol);

  const int a_columns = std::max(0, doc.params.n - 1);
  std::ostringstream csv;
  sw::write_csv_header(csv, doc.params.n, a_columns);
  sw::write_csv_row(csv, row, doc.mass_spec, doc.params.n, a_columns);
  write_output(a.csv, csv.str());

  if (!a.svg.empty()) write_output(a.svg, sw::svg_scatter(config));
  if (!a.mass_csv.empty()) {
    const sw::MassProfile mp = sw::mass_profile(config, sw::default_eta_grid(config, a.eta_points));
    std::ostringstream out;
    out << "eta,chi,M\n";
    for (Eigen::Index k = 0; k < mp.eta_grid.size(); ++k) {
      out << sw::format_real(mp.eta_grid(k)) << ',' << mp.chi[static_cast<std::size_t>(k)] << ','
          << sw::format_real(mp.M(k)) << '\n';
    }
    write_output(a.mass_csv, out.str());
  }
  return kOk;
}

json interval_json(const sw::Interval& x) { return json::array({sw::format_real(x.lower()), sw::format_real(x.upper())}); }

int run_hcheck(const HCheckArgs& a) {
  const std::vector<int> ells = parse_int_list(a.ells, "--ell");
  for (int ell : ells) {
    if (ell < 2) throw sw::ValidationError("spoke count ell must be at least 2");
  }
  json out = json::array();
  bool all = true;
  for (int ell : ells) {
    const sw::HCheckReport r = sw::h_ell_check(ell, a.grid);
    json j;
    j["ell"] = r.ell;
    j["verified"] = r.verified;
    j["grid_points"] = r.grid_points;
    j["deriv_bound"] = sw::format_real(r.deriv_bound);
    j["lower_bound"] = sw::format_real(r.lower_bound);
    if (r.closed_form_verified) j["closed_form_verified"] = *r.closed_form_verified;
    if (r.witness_x) {
      j["witness_x"] = sw::format_real(*r.witness_x);
      j["witness_value"] = interval_json(*r.witness_value);
    }
    j["zeta"] = interval_json(sw::zeta_enclosure(ell));
    j["min_lower_bound"] = sw::format_real(sw::h_ell_lower_bound(ell));
    out.push_back(j);
    all = all && r.verified;
  }
  std::cout << (ells.size() == 1 ? out[0] : out).dump(2) << '\n';
  return all ? kOk : kCertification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiderweb central configurations: construction and interval certification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sw::kToolVersion);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "build a configuration and write a solution document");
  s->add_option("--n", solve.n, "number of rings")->required();
  s->add_option("--ell", solve.ell, "bodies per ring")->required();
  s->add_option("--m0", solve.m0, "central mass");
  s->add_option("--masses", solve.masses, "v1,v2,... | equal:v | equal:1/ell | inv | kappa");
  s->add_option("--lambda", solve.lambda, "proportionality constant (< 0)");
  s->add_option("--tol", solve.tol, "Newton tolerance on ||f||_inf");
  s->add_option("--mass-step", solve.mass_step, "initial continuation step (0 = target/8)");
  s->add_option("--max-iter", solve.max_iter, "Newton iteration cap");
  s->add_option("--max-mass-steps", solve.max_mass_steps, "Continuation increments allowed per ring");
  s->add_flag("--certify", solve.certify, "also certify and embed the certificate");
  s->add_option("--out", solve.out, "output path, - for stdout");

  CertifyArgs cert;
  auto* c = app.add_subcommand("certify", "certify a solution document in place");
  c->add_option("--input", cert.input, "solution document")->required();
  c->add_option("--rho-star", cert.rho_star, "auto or a positive radius");
  c->add_option("--out", cert.out, "output path (default: overwrite input), - for stdout");

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan", "build, certify and profile a grid of (n, ell)");
  sc->add_option("--n", scan.ns, "ring counts: list or start:stop[:step]");
  sc->add_option("--ell", scan.ells, "spoke counts: list or start:stop[:step]");
  sc->add_option("--masses", scan.masses, "mass preset (lists contribute their first n entries)");
  sc->add_option("--m0", scan.m0, "central mass");
  sc->add_option("--lambda", scan.lambda, "proportionality constant");
  sc->add_option("--tol", scan.tol, "Newton tolerance");
  sc->add_option("--convexity-tol", scan.convexity_tol, "second-difference tolerance");
  sc->add_flag("--no-certify", scan.no_certify, "skip certification");
  sc->add_option("--jobs", scan.jobs, "worker threads (SPIDERWEB_JOBS overrides)");
  sc->add_option("--out", scan.out, "CSV path, - for stdout");

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "spacing profile, mass distribution and SVG of a solution");
  a->add_option("--input", an.input, "solution document")->required();
  a->add_option("--csv", an.csv, "CSV path, - for stdout");
  a->add_option("--svg", an.svg, "SVG scatter of body positions");
  a->add_option("--mass-csv", an.mass_csv, "CSV of eta, chi(eta), M(eta)");
  a->add_option("--eta-points", an.eta_points, "samples on [0, 1.25 r_n]");
  a->add_option("--convexity-tol", an.convexity_tol, "second-difference tolerance");

  HCheckArgs hc;
  auto* h = app.add_subcommand("hcheck", "grid proof of h_ell > 0 on [0, 1]");
  h->add_option("--ell", hc.ells, "spoke count(s): list or start:stop[:step]")->required();
  h->add_option("--grid", hc.grid, "grid size p (0 = automatic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report(kValidation, "ValidationError", "usage", e.what());
  }

  try {
    if (*s) return run_solve(solve);
    if (*c) return run_certify(cert);
    if (*sc) return run_scan(scan);
    if (*a) return run_analyze(an);
    if (*h) return run_hcheck(hc);
  } catch (const sw::ValidationError& e) {
    return report(kValidation, "ValidationError", dynamic_cast<const sw::CollisionError*>(&e) ? "collision" : "",
                  e.what());
  } catch (const sw::SolverError& e) {
    return report(kSolver, "SolverError", sw::to_string(e.kind()), e.what());
  } catch (const sw::CertificationFailed& e) {
    return report(kCertification, "CertificationFailed", sw::to_string(e.reason()), e.what());
  } catch (const sw::IntervalError& e) {
    return report(kCertification, "CertificationFailed", "EvaluationFailed", e.what());
  } catch (const std::exception& e) {
    return report(1, "InternalError", "", e.what());
  }
  return kOk;
}

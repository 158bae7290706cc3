#include "spiderweb/document.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "spiderweb/analysis.hpp"
#include "spiderweb/solver.hpp"

namespace spiderweb {

using json = nlohmann::ordered_json;
using nlohmann::ordered_json;

namespace {

const ordered_json& field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("document is missing '") + key + "'");
  return j.at(key);
}

ordered_json real_array(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(format_real(v(i)));
  return a;
}

Eigen::VectorXd parse_real_array(const ordered_json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError("'" + what + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_real(j[i], what);
  return v;
}

int parse_int(const ordered_json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ValidationError("'" + what + "' must be an integer");
  return j.get<int>();
}

}  // namespace

double parse_real(const ordered_json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ValidationError("'" + what + "' must be a decimal string or number");
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ValidationError("'" + what + "' is not a number: " + s);
  return v;
}

ordered_json to_json(const Certificate& c) {
  ordered_json j;
  j["center"] = real_array(c.center);
  j["rho_star"] = format_real(c.rho_star);
  j["Y0"] = format_real(c.Y0);
  j["Z0"] = format_real(c.Z0);
  j["Z2"] = format_real(c.Z2);
  j["rho0"] = format_real(c.rho0);
  j["p_at_rho0"] = format_real(c.p_at_rho0);
  return j;
}

Certificate certificate_from_json(const ordered_json& j) {
  Certificate c;
  c.center = parse_real_array(field(j, "center"), "center");
  c.rho_star = parse_real(field(j, "rho_star"), "rho_star");
  c.Y0 = parse_real(field(j, "Y0"), "Y0");
  c.Z0 = parse_real(field(j, "Z0"), "Z0");
  c.Z2 = parse_real(field(j, "Z2"), "Z2");
  c.rho0 = parse_real(field(j, "rho0"), "rho0");
  c.p_at_rho0 = parse_real(field(j, "p_at_rho0"), "p_at_rho0");
  return c;
}

ordered_json to_json(const ContinuationSettings& s) {
  ordered_json j;
  j["mass_step_init"] = format_real(s.mass_step_init);
  j["step_shrink"] = format_real(s.step_shrink);
  j["step_grow"] = format_real(s.step_grow);
  j["newton_tol"] = format_real(s.newton_tol);
  j["newton_max_iter"] = s.newton_max_iter;
  j["bisect_tol"] = format_real(s.bisect_tol);
  j["max_mass_steps"] = s.max_mass_steps;
  return j;
}

ordered_json to_json(const SolutionDocument& doc) {
  ordered_json j;
  j["schema_version"] = doc.schema_version;
  ordered_json p;
  p["n"] = doc.params.n;
  p["ell"] = doc.params.ell;
  p["m0"] = format_real(doc.params.m0);
  ordered_json masses = ordered_json::array();
  for (double m : doc.params.masses) masses.push_back(format_real(m));
  p["masses"] = masses;
  p["lambda"] = format_real(doc.params.lambda);
  p["allow_massless_rings"] = doc.params.allow_massless_rings;
  if (!doc.mass_spec.empty()) p["mass_spec"] = doc.mass_spec;
  j["params"] = p;
  j["radii"] = real_array(doc.radii);
  j["residual_norm"] = format_real(doc.residual_norm);
  if (doc.certificate) j["certificate"] = to_json(*doc.certificate);
  j["provenance"] = doc.provenance;
  return j;
}

SolutionDocument document_from_json(const ordered_json& j) {
  SolutionDocument doc;
  doc.schema_version = parse_int(field(j, "schema_version"), "schema_version");
  if (doc.schema_version != kSchemaVersion) {
    throw ValidationError("unsupported schema_version " + std::to_string(doc.schema_version));
  }
  const ordered_json& p = field(j, "params");
  doc.params.n = parse_int(field(p, "n"), "n");
  doc.params.ell = parse_int(field(p, "ell"), "ell");
  doc.params.m0 = parse_real(field(p, "m0"), "m0");
  const ordered_json& masses = field(p, "masses");
  if (!masses.is_array()) throw ValidationError("'masses' must be an array");
  doc.params.masses.clear();
  for (const auto& m : masses) doc.params.masses.push_back(parse_real(m, "masses"));
  doc.params.lambda = parse_real(field(p, "lambda"), "lambda");
  if (p.contains("allow_massless_rings")) {
    if (!p["allow_massless_rings"].is_boolean()) throw ValidationError("'allow_massless_rings' must be a boolean");
    doc.params.allow_massless_rings = p["allow_massless_rings"].get<bool>();
  }
  if (p.contains("mass_spec")) {
    if (!p["mass_spec"].is_string()) throw ValidationError("'mass_spec' must be a string");
    doc.mass_spec = p["mass_spec"].get<std::string>();
  }
  doc.params.validate();
  doc.radii = parse_real_array(field(j, "radii"), "radii");
  if (doc.radii.size() != doc.params.n) throw ValidationError("radii length does not match n");
  doc.residual_norm = parse_real(field(j, "residual_norm"), "residual_norm");
  if (j.contains("certificate") && !j["certificate"].is_null()) doc.certificate = certificate_from_json(j["certificate"]);
  if (j.contains("provenance")) doc.provenance = j["provenance"];
  return doc;
}

std::string emit_document(const SolutionDocument& doc) { return to_json(doc).dump(2) + "\n"; }

SolutionDocument parse_document(const std::string& text) {
  // ordered_json keeps provenance keys in file order across round trips.
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return document_from_json(j);
}

std::string svg_scatter(const Configuration& config, int size_px) {
  require_in_cone(config.radii);
  const auto& p = config.params;
  const double rmax = config.radii(config.radii.size() - 1);
  const double half = 0.5 * size_px;
  const double scale = 0.9 * half / rmax;
  double mmax = p.m0;
  for (double m : p.masses) mmax = std::max(mmax, m);
  const double dot_max = std::max(1.5, 0.08 * half * std::min(1.0, 6.0 / config.radii.size() / std::sqrt(p.ell)));
  auto dot = [&](double m) { return mmax > 0.0 ? std::max(0.5, dot_max * std::cbrt(m / mmax)) : 0.5; };

  std::ostringstream os;
  os.precision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size_px << "\" height=\"" << size_px
     << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<!-- n=" << p.n << " ell=" << p.ell << " m0=" << format_real(p.m0) << " lambda=" << format_real(p.lambda)
     << " -->\n";
  if (p.m0 > 0.0) os << "<circle cx=\"" << half << "\" cy=\"" << half << "\" r=\"" << dot(p.m0) << "\" fill=\"black\"/>\n";
  for (Eigen::Index i = 0; i < config.radii.size(); ++i) {
    const double m = p.masses[static_cast<std::size_t>(i)];
    for (int k = 0; k < p.ell; ++k) {
      const double theta = 2.0 * M_PI * k / p.ell;
      const double x = half + scale * config.radii(i) * std::cos(theta);
      const double y = half - scale * config.radii(i) * std::sin(theta);
      os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << dot(m) << "\" fill=\""
         << (m > 0.0 ? "steelblue" : "none") << "\" stroke=\"steelblue\" stroke-width=\"0.5\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace spiderweb

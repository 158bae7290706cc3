#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "spiderweb/certify.hpp"
#include "spiderweb/params.hpp"
#include "spiderweb/solver.hpp"

namespace spiderweb {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// What `solve` writes and `certify`/`analyze` read. Reals are stored as
/// 17-significant-digit decimal strings so a round trip is lossless.
struct SolutionDocument {
  int schema_version = kSchemaVersion;
  SpiderwebParams params;
  /// Preset text the masses came from, empty when unknown.
  std::string mass_spec;
  Eigen::VectorXd radii;
  double residual_norm = 0.0;
  std::optional<Certificate> certificate;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  Configuration configuration() const { return Configuration{params, radii, residual_norm}; }
};

nlohmann::ordered_json to_json(const SolutionDocument& doc);
nlohmann::ordered_json to_json(const Certificate& cert);
nlohmann::ordered_json to_json(const ContinuationSettings& settings);

/// Throws ValidationError on missing fields, wrong types or bad numbers.
SolutionDocument document_from_json(const nlohmann::ordered_json& j);
Certificate certificate_from_json(const nlohmann::ordered_json& j);

std::string emit_document(const SolutionDocument& doc);
SolutionDocument parse_document(const std::string& text);

/// Accepts a decimal string or a JSON number.
double parse_real(const nlohmann::ordered_json& j, const std::string& what);

/// Plain SVG 1.1 scatter of all bodies; circle radii scale with mass^(1/3).
std::string svg_scatter(const Configuration& config, int size_px = 640);

}  // namespace spiderweb

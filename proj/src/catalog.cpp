#include "trotterkit/catalog.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace trotterkit {

namespace detail {
extern const std::string_view bundled_catalog_json;
}

namespace {

using nlohmann::json;

std::vector<cplx> coefficients(const json& j, const std::string& field) {
  std::vector<cplx> out;
  for (const auto& pair : j.at(field)) {
    if (pair.is_number()) {
      out.emplace_back(pair.get<double>(), 0.0);
    } else if (pair.is_array() && pair.size() == 2) {
      out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    } else {
      throw Error(ErrorCategory::Structural, "coefficient '" + field + "' entries must be [re, im]");
    }
  }
  return out;
}

TwoStageScheme parse_record(const json& j) {
  try {
    TwoStageScheme s;
    s.name = j.at("name").get<std::string>();
    s.order = j.at("order").get<int>();
    s.a = coefficients(j, "a");
    s.b = coefficients(j, "b");
    s.symmetric = j.value("symmetric", false);
    s.source = j.value("source", std::string{});
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::Structural, std::string("malformed scheme record: ") + e.what());
  }
}

}  // namespace

double gatekeep_scheme(const TwoStageScheme& scheme) {
  const ValidationReport report = validate_consistency(scheme);
  if (!report.passed())
    throw Error(ErrorCategory::Validation, "catalog entry '" + scheme.name + "' fails the consistency check");
  const auto grid = default_order_grid();
  const double slope = empirical_order(scheme, 8, grid);
  const int expected = scheme.symmetric && scheme.order % 2 == 1 ? scheme.order + 1 : scheme.order;
  if (std::abs(slope - expected) > 0.5)
    throw Error(ErrorCategory::Validation, "catalog entry '" + scheme.name + "' claims order " +
                                               std::to_string(scheme.order) + " but fits " + format_double(slope));
  return slope;
}

TwoStageScheme scheme_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    // A single-entry catalog file is accepted as well as a bare record.
    if (doc.is_array() && doc.size() == 1) return parse_record(doc[0]);
    return parse_record(doc);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::Structural, std::string("invalid JSON: ") + e.what());
  }
}

SchemeCatalog SchemeCatalog::from_json(std::string_view text, bool gatekeep) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::Structural, std::string("invalid catalog JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCategory::Structural, "catalog must be a JSON array");
  std::vector<TwoStageScheme> entries;
  for (const auto& rec : doc) {
    entries.push_back(parse_record(rec));
    if (gatekeep) gatekeep_scheme(entries.back());
  }
  return SchemeCatalog(std::move(entries));
}

SchemeCatalog SchemeCatalog::from_file(const std::filesystem::path& path, bool gatekeep) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::Io, "cannot read catalog " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), gatekeep);
}

const SchemeCatalog& SchemeCatalog::bundled() {
  static const SchemeCatalog catalog = from_json(detail::bundled_catalog_json, true);
  return catalog;
}

const TwoStageScheme& SchemeCatalog::find(std::string_view name) const {
  for (const auto& s : entries_)
    if (s.name == name) return s;
  throw Error(ErrorCategory::NotFound, "no scheme named '" + std::string(name) + "'");
}

bool SchemeCatalog::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& s) { return s.name == name; });
}

}  // namespace trotterkit

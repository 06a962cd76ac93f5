#pragma once

#include "trotterkit/schemes.hpp"

#include <filesystem>
#include <string_view>

namespace trotterkit {

/// Named two-stage schemes loaded from a `schemes.json` array of
/// {name, order, a: [[re,im],...], b: [[re,im],...], symmetric, source}.
class SchemeCatalog {
 public:
  SchemeCatalog() = default;
  explicit SchemeCatalog(std::vector<TwoStageScheme> entries) : entries_(std::move(entries)) {}

  /// Parses the JSON text. With `gatekeep`, every entry must pass validate_consistency and
  /// show a fitted order within 0.5 of its claim; otherwise Error(Validation).
  static SchemeCatalog from_json(std::string_view text, bool gatekeep = true);
  static SchemeCatalog from_file(const std::filesystem::path& path, bool gatekeep = true);
  /// The catalog compiled into the library.
  static const SchemeCatalog& bundled();

  const std::vector<TwoStageScheme>& entries() const { return entries_; }
  /// Throws Error(NotFound).
  const TwoStageScheme& find(std::string_view name) const;
  bool contains(std::string_view name) const;

 private:
  std::vector<TwoStageScheme> entries_;
};

/// Parses a single scheme record (same layout as one catalog entry).
TwoStageScheme scheme_from_json(std::string_view text);

/// Gate-keeping check used on catalog load; returns the fitted slope.
double gatekeep_scheme(const TwoStageScheme& scheme);

}  // namespace trotterkit

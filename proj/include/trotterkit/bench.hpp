#pragma once

#include "trotterkit/catalog.hpp"
#include "trotterkit/polyexp.hpp"
#include "trotterkit/spinmodel.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trotterkit {

/// One benchmarked propagator.
struct MethodSpec {
  enum class Kind { Scheme, Polynomial, Exact };
  Kind kind = Kind::Scheme;
  std::string scheme;               // Scheme
  bool alternate_reversal = false;  // Scheme
  Family family = Family::Taylor;   // Polynomial
  int k = 0;                        // Polynomial
  Axis axis = Axis::Imaginary;      // Chebyshev
  bool summed = false;              // Polynomial: direct summation instead of the factorized product

  /// Stable identifier used in CSV output, e.g. "suzuki", "taylor-k52-prod", "chebyshev-k40-imaginary-sum".
  std::string id() const;
  /// Parses a scheme name, "exact", or the identifiers produced by id().
  static MethodSpec parse(const std::string& text);
};

struct BenchPlan {
  XxzConfig model;
  double t_total = 10.0;
  std::vector<MethodSpec> methods;
  std::vector<double> h_grid;
  double kappa = 6.0;  // polynomial of order k costs k / kappa cycles
  bool record_wall_time = true;

  void validate() const;
  /// JSON object {model: {L, delta, boundary, J}, t_total, methods: [...], h_grid: [...], kappa}.
  static BenchPlan from_json(const std::string& text);
  static BenchPlan from_file(const std::filesystem::path& path);
  /// Default geometry: L = 8 open chain, t = 10, h from 1 down to 1/64.
  static BenchPlan desk_default();
  /// One-line description written as a CSV comment.
  std::string metadata() const;
};

struct BenchmarkRecord {
  std::string method;
  double h = 0.0;
  long steps = 0;
  double cost = 0.0;  // cycles per unit time
  double error = 0.0;
  double wall_time = 0.0;
};

long step_count(double t_total, double h);

/// Runs every (method, h) cell against a shared exact-diagonalization oracle.
std::vector<BenchmarkRecord> run_benchmark(const BenchPlan& plan, const SchemeCatalog& catalog,
                                           const ZeroCache* cache = nullptr);

/// CSV `method,h,steps,cost,error,wall_time`, rows sorted by (method, cost), 17 significant digits.
/// Metadata, when given, precedes the header as `# ` comment lines.
void emit_records(std::vector<BenchmarkRecord> records, const std::filesystem::path& csv,
                  const std::optional<std::filesystem::path>& plot_data = std::nullopt,
                  const std::string& metadata = {});
std::string format_records_csv(std::vector<BenchmarkRecord> records, const std::string& metadata = {});
/// One blank-line separated block per method with `cost error` rows.
std::string format_plot_data(std::vector<BenchmarkRecord> records);

/// Error of `method` at `cost` by log-log linear interpolation between neighbouring grid points;
/// empty outside the sampled cost range.
std::optional<double> interpolate_error(const std::vector<BenchmarkRecord>& records, const std::string& method,
                                        double cost);

struct StabilityRow {
  int k = 0;
  cplx z;
  double err_sum = 0.0;
  double err_prod = 0.0;
};

/// Relative deviation of summed and factorized Taylor evaluation from the exactly rounded
/// truncated series at each (k, z).
std::vector<StabilityRow> stability_probe(const std::vector<int>& k_list, const std::vector<cplx>& z_samples,
                                          const ZeroCache* cache = nullptr);
std::string format_stability_csv(const std::vector<StabilityRow>& rows);

}  // namespace trotterkit

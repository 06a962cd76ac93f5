#include "trotterkit/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace trotterkit {

using nlohmann::json;

std::string MethodSpec::id() const {
  switch (kind) {
    case Kind::Exact: return "exact";
    case Kind::Scheme: return alternate_reversal ? scheme + "-alt" : scheme;
    case Kind::Polynomial: {
      std::string out = std::string(family_name(family)) + "-k" + std::to_string(k);
      if (family == Family::Chebyshev) out += "-" + std::string(axis_name(axis));
      return out + (summed ? "-sum" : "-prod");
    }
  }
  return {};
}

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec m;
  if (text == "exact") {
    m.kind = Kind::Exact;
    return m;
  }
  const bool taylor = text.rfind("taylor-k", 0) == 0;
  const bool cheb = text.rfind("chebyshev-k", 0) == 0;
  if (!taylor && !cheb) {
    m.scheme = text;
    if (text.size() > 4 && text.ends_with("-alt")) {
      m.scheme = text.substr(0, text.size() - 4);
      m.alternate_reversal = true;
    }
    return m;
  }
  m.kind = Kind::Polynomial;
  m.family = taylor ? Family::Taylor : Family::Chebyshev;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, '-');) parts.push_back(part);
  const std::size_t expected = taylor ? 3 : 4;
  auto bad = [&] { return Error(ErrorCategory::Usage, "cannot parse method '" + text + "'"); };
  if (parts.size() != expected) throw bad();
  try {
    m.k = std::stoi(parts[1].substr(1));
  } catch (const std::exception&) {
    throw bad();
  }
  if (!taylor) {
    if (parts[2] == "real")
      m.axis = Axis::Real;
    else if (parts[2] == "imaginary")
      m.axis = Axis::Imaginary;
    else
      throw bad();
  }
  if (parts.back() == "sum")
    m.summed = true;
  else if (parts.back() != "prod")
    throw bad();
  if (m.k < 1) throw bad();
  return m;
}

void BenchPlan::validate() const {
  model.validate();
  if (!(t_total > 0.0)) throw Error(ErrorCategory::Range, "t_total must be positive");
  if (!(kappa > 0.0)) throw Error(ErrorCategory::Range, "kappa must be positive");
  if (methods.empty()) throw Error(ErrorCategory::Structural, "plan lists no methods");
  if (h_grid.empty()) throw Error(ErrorCategory::Structural, "plan lists no step sizes");
  for (double h : h_grid)
    if (!(h > 0.0)) throw Error(ErrorCategory::Range, "step sizes must be positive");
}

BenchPlan BenchPlan::from_json(const std::string& text) {
  BenchPlan plan = desk_default();
  try {
    const json j = json::parse(text);
    if (j.contains("model")) {
      const auto& m = j.at("model");
      plan.model.L = m.value("L", plan.model.L);
      plan.model.delta = m.value("delta", plan.model.delta);
      plan.model.J = m.value("J", plan.model.J);
      if (m.contains("boundary")) plan.model.boundary = parse_boundary(m.at("boundary").get<std::string>());
    }
    plan.t_total = j.value("t_total", plan.t_total);
    plan.kappa = j.value("kappa", plan.kappa);
    plan.record_wall_time = j.value("record_wall_time", plan.record_wall_time);
    if (j.contains("h_grid")) plan.h_grid = j.at("h_grid").get<std::vector<double>>();
    if (j.contains("methods")) {
      plan.methods.clear();
      for (const auto& m : j.at("methods")) plan.methods.push_back(MethodSpec::parse(m.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::Structural, std::string("invalid bench plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

BenchPlan BenchPlan::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::Io, "cannot read plan " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

BenchPlan BenchPlan::desk_default() {
  BenchPlan plan;
  plan.model = XxzConfig{8, 1.0, Boundary::Open, 1.0};
  plan.t_total = 10.0;
  for (const char* name : {"forest-ruth", "suzuki", "blanes-moan"}) plan.methods.push_back(MethodSpec::parse(name));
  for (int i = 0; i <= 6; ++i) plan.h_grid.push_back(std::ldexp(1.0, -i));
  return plan;
}

std::string BenchPlan::metadata() const {
  std::ostringstream os;
  os << "model=xxz L=" << model.L << " delta=" << format_double(model.delta)
     << " boundary=" << boundary_name(model.boundary) << " J=" << format_double(model.J)
     << " t_total=" << format_double(t_total) << " kappa=" << format_double(kappa);
  return os.str();
}

long step_count(double t_total, double h) { return std::max(1L, std::lround(t_total / h)); }

namespace {

// Polynomial propagator for one step of size h: p(h * (-i H)) applied to the identity.
MatrixXc polynomial_step(const MethodSpec& m, const MatrixXc& H, double gamma, double h, const ZeroCache* cache) {
  SeriesSpec spec{m.family, m.k, m.family == Family::Chebyshev ? gamma : 0.0, m.axis, h};
  const MatrixXc G = cplx(0.0, -1.0) * H;
  const MatrixXc I = MatrixXc::Identity(H.rows(), H.cols());
  if (m.summed) return eval_summed(G, I, spec);
  const FactorizedPolynomial fact = factorize(spec, cache);
  return eval_factorized(G, I, fact);
}

}  // namespace

std::vector<BenchmarkRecord> run_benchmark(const BenchPlan& plan, const SchemeCatalog& catalog,
                                           const ZeroCache* cache) {
  plan.validate();
  for (const auto& m : plan.methods)
    if (m.kind == MethodSpec::Kind::Scheme) catalog.find(m.scheme);  // resolve everything up front

  const OperatorSplit split = build_xxz(plan.model);
  const HermitianSpectrum spectrum(split.total);
  const MatrixXc exact = spectrum.exp(generator(Direction::RealTime) * plan.t_total);
  const double gamma = 1.01 * spectrum.spectral_radius();

  std::vector<BenchmarkRecord> records;
  for (const auto& m : plan.methods) {
    std::optional<MultiStageScheme> ms;
    if (m.kind == MethodSpec::Kind::Scheme) ms = to_multistage(catalog.find(m.scheme));
    for (double h_nominal : plan.h_grid) {
      const long steps = step_count(plan.t_total, h_nominal);
      const double h = plan.t_total / static_cast<double>(steps);
      const auto start = std::chrono::steady_clock::now();
      MatrixXc U;
      double q = 0.0;
      switch (m.kind) {
        case MethodSpec::Kind::Exact:
          U = matrix_power(spectrum.exp(generator(Direction::RealTime) * h), steps);
          q = 1.0;
          break;
        case MethodSpec::Kind::Scheme:
          U = evolve(split, *ms, h, steps, m.alternate_reversal);
          q = ms->cycles();
          break;
        case MethodSpec::Kind::Polynomial:
          U = matrix_power(polynomial_step(m, split.total, gamma, h, cache), steps);
          q = m.k / plan.kappa;
          break;
      }
      const auto stop = std::chrono::steady_clock::now();
      BenchmarkRecord r;
      r.method = m.id();
      r.h = h;
      r.steps = steps;
      r.cost = q * static_cast<double>(steps) / plan.t_total;
      r.error = frobenius_error(U, exact, plan.t_total, r.method).value;
      r.wall_time = plan.record_wall_time ? std::chrono::duration<double>(stop - start).count() : 0.0;
      records.push_back(std::move(r));
    }
  }
  return records;
}

namespace {

void sort_records(std::vector<BenchmarkRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const auto& x, const auto& y) {
    return x.method != y.method ? x.method < y.method : x.cost < y.cost;
  });
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
}

}  // namespace

std::string format_records_csv(std::vector<BenchmarkRecord> records, const std::string& metadata) {
  sort_records(records);
  std::ostringstream os;
  if (!metadata.empty()) {
    std::istringstream lines(metadata);
    for (std::string line; std::getline(lines, line);) os << "# " << line << "\n";
  }
  os << "method,h,steps,cost,error,wall_time\n";
  for (const auto& r : records)
    os << r.method << ',' << format_double(r.h) << ',' << r.steps << ',' << format_double(r.cost) << ','
       << format_double(r.error) << ',' << format_double(r.wall_time) << "\n";
  return os.str();
}

std::string format_plot_data(std::vector<BenchmarkRecord> records) {
  sort_records(records);
  std::ostringstream os;
  std::string current;
  bool first = true;
  for (const auto& r : records) {
    if (first || r.method != current) {
      if (!first) os << "\n\n";
      os << "# " << r.method << "\n";
      current = r.method;
      first = false;
    }
    os << format_double(r.cost) << ' ' << format_double(r.error) << "\n";
  }
  return os.str();
}

void emit_records(std::vector<BenchmarkRecord> records, const std::filesystem::path& csv,
                  const std::optional<std::filesystem::path>& plot_data, const std::string& metadata) {
  if (records.empty()) throw Error(ErrorCategory::Structural, "no records to emit");
  write_file(csv, format_records_csv(records, metadata));
  if (plot_data) write_file(*plot_data, format_plot_data(std::move(records)));
}

std::optional<double> interpolate_error(const std::vector<BenchmarkRecord>& records, const std::string& method,
                                        double cost) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records)
    if (r.method == method && r.cost > 0.0 && r.error > 0.0) pts.emplace_back(r.cost, r.error);
  std::sort(pts.begin(), pts.end());
  if (pts.empty() || cost < pts.front().first || cost > pts.back().first) return std::nullopt;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [c0, e0] = pts[i];
    const auto [c1, e1] = pts[i + 1];
    if (cost < c0 || cost > c1) continue;
    if (c1 == c0) return e0;
    const double t = (std::log(cost) - std::log(c0)) / (std::log(c1) - std::log(c0));
    return std::exp((1.0 - t) * std::log(e0) + t * std::log(e1));
  }
  return pts.back().second;
}

std::vector<StabilityRow> stability_probe(const std::vector<int>& k_list, const std::vector<cplx>& z_samples,
                                          const ZeroCache* cache) {
  std::vector<StabilityRow> rows;
  for (int k : k_list) {
    const SeriesSpec spec{Family::Taylor, k, 0.0, Axis::Real, 1.0};
    const FactorizedPolynomial fact = factorize(spec, cache);
    for (const cplx z : z_samples) {
      const cplx ref = taylor_polynomial_reference(k, z);
      const double scale = std::abs(ref);
      rows.push_back({k, z, std::abs(evaluate_summed(spec, z) - ref) / scale,
                      std::abs(fact.evaluate(z) - ref) / scale});
    }
  }
  return rows;
}

std::string format_stability_csv(const std::vector<StabilityRow>& rows) {
  std::ostringstream os;
  os << "k,z_re,z_im,err_sum,err_prod\n";
  for (const auto& r : rows)
    os << r.k << ',' << format_double(r.z.real()) << ',' << format_double(r.z.imag()) << ','
       << format_double(r.err_sum) << ',' << format_double(r.err_prod) << "\n";
  return os.str();
}

}  // namespace trotterkit

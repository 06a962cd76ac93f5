#include "trotterkit/bench.hpp"
#include "trotterkit/catalog.hpp"
#include "trotterkit/multistage.hpp"
#include "trotterkit/polyexp.hpp"
#include "trotterkit/spinmodel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

using namespace trotterkit;

namespace {

struct Globals {
  std::string catalog_path;
  std::string zeros_dir = "zeros";
  std::uint64_t seed = 20221103;

  SchemeCatalog catalog() const {
    if (catalog_path.empty()) return SchemeCatalog::bundled();
    return SchemeCatalog::from_file(catalog_path);
  }
  ZeroCache zeros() const { return ZeroCache(zeros_dir); }
};

std::string json_number(double x) {
  if (!std::isfinite(x)) return "null";
  return format_double(x);
}

std::string json_complex(cplx z) { return "[" + json_number(z.real()) + ", " + json_number(z.imag()) + "]"; }

std::string json_complex_list(const std::vector<cplx>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_complex(v[i]);
  return out + "]";
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Accepts "x", "yi", "x+yi", "x-yi" and "(x,y)".
cplx parse_complex(const std::string& text) {
  static const std::regex number(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex pair(R"(\(\s*([^,]+)\s*,\s*([^)]+)\s*\))");
  static const std::regex full(
      R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?:([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i)?)");
  std::smatch m;
  if (std::regex_match(text, m, pair)) return {std::stod(m[1]), std::stod(m[2])};
  if (std::regex_match(text, number)) return {std::stod(text), 0.0};
  if (!text.empty() && text.back() == 'i') {
    const std::string body = text.substr(0, text.size() - 1);
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    if (std::regex_match(body, number)) return {0.0, std::stod(body)};
    if (std::regex_match(text, m, full) && m[1].matched && m[2].matched) {
      const std::string im = m[2].str();
      const double y = (im == "+" || im == "-") ? (im == "+" ? 1.0 : -1.0) : std::stod(im);
      return {std::stod(m[1]), y};
    }
  }
  throw Error(ErrorCategory::Usage, "cannot parse complex number '" + text + "'");
}

Axis parse_axis(const std::string& s) {
  if (s == "real") return Axis::Real;
  if (s == "imaginary") return Axis::Imaginary;
  throw Error(ErrorCategory::Usage, "axis must be 'real' or 'imaginary'");
}

Family parse_family(const std::string& s) {
  if (s == "taylor") return Family::Taylor;
  if (s == "chebyshev") return Family::Chebyshev;
  throw Error(ErrorCategory::Usage, "family must be 'taylor' or 'chebyshev'");
}

TwoStageScheme resolve_scheme(const Globals& g, const std::string& name_or_file) {
  if (std::filesystem::is_regular_file(name_or_file)) {
    std::ifstream in(name_or_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return scheme_from_json(ss.str());
  }
  return g.catalog().find(name_or_file);
}

int cmd_schemes_list(const Globals& g) {
  const SchemeCatalog catalog = g.catalog();
  std::cout << "name,order,q,symmetric,real\n";
  for (const auto& s : catalog.entries())
    std::cout << s.name << ',' << s.order << ',' << s.cycles() << ',' << (s.symmetric ? "true" : "false") << ','
              << (s.is_real() ? "true" : "false") << "\n";
  return 0;
}

int cmd_schemes_validate(const Globals& g, const std::string& target) {
  const TwoStageScheme s = resolve_scheme(g, target);
  const ValidationReport r = validate_consistency(s);
  std::optional<double> slope;
  std::string order_error;
  if (r.consistent) {
    try {
      const auto grid = default_order_grid();
      slope = empirical_order(s, 8, grid, g.seed);
    } catch (const Error& e) {
      order_error = e.what();
    }
  }
  const int expected = s.symmetric && s.order % 2 == 1 ? s.order + 1 : s.order;
  const bool order_ok = slope && std::abs(*slope - expected) <= 0.5;
  const bool ok = r.passed() && order_ok;
  std::cout << "{\"name\": " << json_string(s.name) << ", \"consistent\": " << (r.consistent ? "true" : "false")
            << ", \"residual_a\": " << json_complex(r.residual_a) << ", \"residual_b\": " << json_complex(r.residual_b)
            << ", \"symmetry_ok\": " << (r.symmetry_ok ? "true" : "false")
            << ", \"fitted_order\": " << (slope ? json_number(*slope) : "null") << ", \"claimed_order\": " << s.order
            << ", \"passed\": " << (ok ? "true" : "false") << "}\n";
  if (!ok) {
    std::string why = !r.consistent ? "consistency condition violated"
                      : !r.symmetry_ok ? "coefficients are not palindromic"
                      : !order_error.empty() ? order_error
                                             : "fitted order disagrees with the claim";
    std::cerr << "error:validation: scheme '" << s.name << "': " << why << "\n";
    return 1;
  }
  return 0;
}

int cmd_schemes_efficiency(const Globals& g, const std::string& name) {
  const TwoStageScheme s = resolve_scheme(g, name);
  ErrorEstimateOptions opt;
  opt.seed = g.seed;
  const EfficiencyScore e = efficiency(s, opt);
  std::cout << "{\"name\": " << json_string(s.name) << ", \"order\": " << e.order << ", \"q\": " << e.q
            << ", \"eff\": " << json_number(e.eff) << ", \"leading_error\": " << json_number(e.leading_error)
            << ", \"order_underclaimed\": " << (e.order_underclaimed ? "true" : "false") << "}\n";
  return 0;
}

int cmd_adapt(const Globals& g, const std::string& name, bool check, int lambda, bool alternate) {
  const TwoStageScheme s = resolve_scheme(g, name);
  const MultiStageScheme ms = to_multistage(s);
  if (!check) {
    cplx sum = 0.0;
    for (int i = 0; i < ms.cycles(); ++i) sum += ms.c[i] + ms.d[i];
    std::cout << "{\"name\": " << json_string(ms.name) << ", \"order\": " << ms.order << ", \"q\": " << ms.cycles()
              << ", \"c\": " << json_complex_list(ms.c) << ", \"d\": " << json_complex_list(ms.d)
              << ", \"sum\": " << json_complex(sum) << "}\n";
    return 0;
  }
  if (lambda < 1) throw Error(ErrorCategory::Usage, "--lambda must be >= 1");
  const OperatorSplit split = random_split(lambda, 8, g.seed);
  const auto grid = default_order_grid();
  const double slope = empirical_order(split, ms, grid, alternate);
  std::cout << "{\"name\": " << json_string(ms.name) << ", \"lambda\": " << lambda
            << ", \"alternate_reversal\": " << (alternate ? "true" : "false")
            << ", \"fitted_order\": " << json_number(slope) << "}\n";
  return 0;
}

SeriesSpec series_from_flags(const std::string& family, int k, double gamma_h, const std::string& axis) {
  SeriesSpec spec;
  spec.family = parse_family(family);
  spec.k = k;
  spec.h = 1.0;
  if (spec.family == Family::Chebyshev) {
    if (!(gamma_h > 0.0)) throw Error(ErrorCategory::Usage, "chebyshev needs --gamma-h > 0");
    spec.gamma_scale = gamma_h;
    spec.axis = parse_axis(axis);
  }
  spec.validate();
  return spec;
}

int cmd_zeros(const Globals& g, const std::string& family, int k, double gamma_h, const std::string& axis) {
  const SeriesSpec spec = series_from_flags(family, k, gamma_h, axis);
  const ZeroCache cache = g.zeros();
  const FactorizedPolynomial f = factorize(spec, &cache);
  std::cout << "# " << family_name(spec.family) << " k=" << spec.k;
  if (spec.family == Family::Chebyshev)
    std::cout << " gamma_h=" << format_double(spec.gamma_h()) << " axis=" << axis_name(spec.axis);
  std::cout << " scale=" << format_double(f.overall_scale) << "\n";
  std::cout << "z_re,z_im,gamma_re,gamma_im\n";
  for (std::size_t i = 0; i < f.zeros.size(); ++i)
    std::cout << format_double(f.zeros[i].real()) << ',' << format_double(f.zeros[i].imag()) << ','
              << format_double(f.gammas[i].real()) << ',' << format_double(f.gammas[i].imag()) << "\n";
  return 0;
}

int cmd_expm(const Globals& g, const std::string& method, int k, bool summed, const std::string& scalar,
             double gamma_h, const std::string& axis) {
  const cplx z = parse_complex(scalar);
  const Family fam = parse_family(method);
  double gh = gamma_h;
  if (fam == Family::Chebyshev && !(gh > 0.0)) gh = std::max(1.0, 1.01 * std::abs(z));
  const SeriesSpec spec = series_from_flags(method, k, gh, axis);
  cplx value;
  if (summed) {
    value = evaluate_summed(spec, z);
  } else {
    const ZeroCache cache = g.zeros();
    value = factorize(spec, &cache).evaluate(z);
  }
  const cplx exact = std::exp(z);
  std::cout << "{\"method\": " << json_string(std::string(family_name(fam))) << ", \"k\": " << k
            << ", \"mode\": " << (summed ? "\"sum\"" : "\"prod\"") << ", \"z\": " << json_complex(z)
            << ", \"value\": " << json_complex(value) << ", \"exp\": " << json_complex(exact)
            << ", \"relative_error\": " << json_number(std::abs(value - exact) / std::abs(exact)) << "}\n";
  return 0;
}

int cmd_model(int L, double delta, const std::string& bc, double J, const std::string& dump) {
  XxzConfig cfg{L, delta, parse_boundary(bc), J};
  const OperatorSplit split = build_xxz(cfg);
  const HermitianSpectrum spec(split.total);
  std::ostringstream os;
  os << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < spec.eigenvalues().size(); ++i)
    os << i << ',' << format_double(spec.eigenvalues()(i)) << "\n";
  if (dump.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(dump);
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + dump);
    out << os.str();
    const auto groups = bond_groups(cfg);
    std::cout << "{\"L\": " << L << ", \"dim\": " << cfg.dim() << ", \"stages\": " << split.stages()
              << ", \"bonds_per_stage\": [" << groups[0].size() << ", " << groups[1].size() << ", "
              << groups[2].size() << "], \"spectrum\": " << json_string(dump) << "}\n";
  }
  return 0;
}

int cmd_bench(const Globals& g, const std::string& config, const std::string& out, const std::string& plot,
              bool no_wall_time) {
  BenchPlan plan = config.empty() ? BenchPlan::desk_default() : BenchPlan::from_file(config);
  if (no_wall_time) plan.record_wall_time = false;
  const ZeroCache cache = g.zeros();
  const auto records = run_benchmark(plan, g.catalog(), &cache);
  std::optional<std::filesystem::path> plot_path;
  if (!plot.empty()) plot_path = plot;
  emit_records(records, out, plot_path, plan.metadata());
  std::cout << "{\"records\": " << records.size() << ", \"out\": " << json_string(out) << "}\n";
  return 0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_probe(const Globals& g, const std::string& ks, const std::vector<std::string>& zs, const std::string& out) {
  std::vector<int> k_list;
  for (const auto& s : split_list(ks)) {
    try {
      k_list.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw Error(ErrorCategory::Usage, "cannot parse k value '" + s + "'");
    }
  }
  if (k_list.empty()) throw Error(ErrorCategory::Usage, "--k needs at least one value");
  std::vector<cplx> z_list;
  for (const auto& s : zs) z_list.push_back(parse_complex(s));
  if (z_list.empty()) z_list = {-5.0, -30.0, -100.0};
  const ZeroCache cache = g.zeros();
  const std::string csv = format_stability_csv(stability_probe(k_list, z_list, &cache));
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorCategory::Io, "cannot write " + out);
    f << csv;
    std::cout << "{\"rows\": " << k_list.size() * z_list.size() << ", \"out\": " << json_string(out) << "}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trotter decompositions and factorized polynomial exponentials", "trotterkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--catalog", g.catalog_path, "Scheme catalog JSON (default: bundled)");
  app.add_option("--zeros-cache", g.zeros_dir, "Directory for cached polynomial zeros")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized checks")->capture_default_str();

  std::function<int()> action;

  auto* schemes = app.add_subcommand("schemes", "Scheme catalog operations");
  schemes->require_subcommand(1);
  schemes->add_subcommand("list", "List catalog entries")->callback([&] { action = [&] { return cmd_schemes_list(g); }; });
  std::string validate_target;
  auto* validate = schemes->add_subcommand("validate", "Check consistency and fitted order (exit 1 on failure)");
  validate->add_option("target", validate_target, "Scheme name or JSON file")->required();
  validate->callback([&] { action = [&] { return cmd_schemes_validate(g, validate_target); }; });
  std::string eff_target;
  auto* eff = schemes->add_subcommand("efficiency", "Print order, cycle count and efficiency");
  eff->add_option("name", eff_target, "Scheme name or JSON file")->required();
  eff->callback([&] { action = [&] { return cmd_schemes_efficiency(g, eff_target); }; });

  std::string adapt_name;
  bool adapt_check = false, adapt_alt = false;
  int adapt_lambda = 3;
  auto* adapt = app.add_subcommand("adapt", "Multi-operator coefficients of a two-stage scheme");
  adapt->add_option("name", adapt_name, "Scheme name or JSON file")->required();
  adapt->add_flag("--check", adapt_check, "Fit the order of the Lambda-operator decomposition");
  adapt->add_option("--lambda", adapt_lambda, "Number of operators for --check")->capture_default_str();
  adapt->add_flag("--alternate-reversal", adapt_alt, "Reverse the coefficients in every second step");
  adapt->callback([&] { action = [&] { return cmd_adapt(g, adapt_name, adapt_check, adapt_lambda, adapt_alt); }; });

  std::string z_family = "taylor", z_axis = "imaginary";
  int z_k = 0;
  double z_gamma_h = 0.0;
  auto* zeros = app.add_subcommand("zeros", "Zeros and factor coefficients of a truncated series");
  zeros->add_option("--family", z_family, "taylor | chebyshev")->capture_default_str();
  zeros->add_option("--k", z_k, "Truncation order")->required();
  zeros->add_option("--gamma-h", z_gamma_h, "Chebyshev interval half-width");
  zeros->add_option("--axis", z_axis, "Chebyshev axis: real | imaginary")->capture_default_str();
  zeros->callback([&] { action = [&] { return cmd_zeros(g, z_family, z_k, z_gamma_h, z_axis); }; });

  std::string e_method = "taylor", e_scalar, e_axis = "imaginary";
  int e_k = 0;
  bool e_sum = false, e_prod = false;
  double e_gamma_h = 0.0;
  auto* expm = app.add_subcommand("expm", "Scalar evaluation of a truncated exponential series");
  expm->add_option("--method", e_method, "taylor | chebyshev")->capture_default_str();
  expm->add_option("--k", e_k, "Truncation order")->required();
  auto* sum_flag = expm->add_flag("--sum", e_sum, "Direct summation");
  expm->add_flag("--prod", e_prod, "Factorized product (default)")->excludes(sum_flag);
  expm->add_option("--scalar", e_scalar, "Argument z, e.g. -30, 5i, 1-2i")->required();
  expm->add_option("--gamma-h", e_gamma_h, "Chebyshev interval half-width (default 1.01 |z|)");
  expm->add_option("--axis", e_axis, "Chebyshev axis: real | imaginary")->capture_default_str();
  expm->callback([&] { action = [&] { return cmd_expm(g, e_method, e_k, e_sum, e_scalar, e_gamma_h, e_axis); }; });

  auto* model = app.add_subcommand("model", "Spin-chain models");
  model->require_subcommand(1);
  int m_L = 8;
  double m_delta = 1.0, m_J = 1.0;
  std::string m_bc = "open", m_dump;
  auto* xxz = model->add_subcommand("xxz", "Heisenberg XXZ chain spectrum");
  xxz->add_option("--L", m_L, "Number of sites")->capture_default_str();
  xxz->add_option("--delta", m_delta, "Anisotropy")->capture_default_str();
  xxz->add_option("--bc", m_bc, "open | periodic")->capture_default_str();
  xxz->add_option("--J", m_J, "Coupling")->capture_default_str();
  xxz->add_option("--dump", m_dump, "Write sorted eigenvalues as CSV");
  xxz->callback([&] { action = [&] { return cmd_model(m_L, m_delta, m_bc, m_J, m_dump); }; });

  std::string b_config, b_out, b_plot;
  bool b_no_wall = false;
  auto* bench = app.add_subcommand("bench", "Error against cost on the XXZ chain");
  bench->add_option("--config", b_config, "Plan JSON (default: desk-scale plan)");
  bench->add_option("--out", b_out, "Result CSV")->required();
  bench->add_option("--plot-data", b_plot, "Plot data file, one block per method");
  bench->add_flag("--no-wall-time", b_no_wall, "Write zero wall times for byte-identical reruns");
  bench->callback([&] { action = [&] { return cmd_bench(g, b_config, b_out, b_plot, b_no_wall); }; });

  std::string p_k = "10,52,304", p_out;
  std::vector<std::string> p_z;
  auto* probe = app.add_subcommand("probe-stability", "Summed against factorized Taylor evaluation");
  probe->add_option("--k", p_k, "Comma-separated truncation orders")->capture_default_str();
  probe->add_option("--z", p_z, "Sample points (default -5 -30 -100)")->delimiter(',');
  probe->add_option("--out", p_out, "Result CSV (default: stdout)");
  probe->callback([&] { action = [&] { return cmd_probe(g, p_k, p_z, p_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error:usage: " << e.what() << "\n";
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    std::cerr << "error:" << category_name(e.category()) << ": " << e.what() << "\n";
    return e.category() == ErrorCategory::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 1;
  }
}

// End-to-end checks of every CLI path: exit code plus parseable output.

#include "support.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("tk-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string(TROTTERKIT_CLI) + " --zeros-cache " + TROTTERKIT_TEST_ZEROS + " " + args +
                          " 2>" + err.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("schemes list prints one CSV row per catalog entry") {
  const Run r = run("schemes list");
  CHECK(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() >= 6);
  CHECK(rows[0] == std::vector<std::string>{"name", "order", "q", "symmetric", "real"});
  CHECK(r.out.find("\nstrang,2,1,true,true\n") != std::string::npos);
}

TEST_CASE("schemes validate: success, not-found, and a failing scheme file") {
  const Run ok = run("schemes validate strang");
  CHECK(ok.code == 0);
  const json j = json::parse(ok.out);
  CHECK(j.at("consistent").get<bool>());

  const Run missing = run("schemes validate bogus-name");
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error:not-found:", 0) == 0);

  const fs::path bad = scratch_dir() / "bad.json";
  std::ofstream(bad) << R"([{"name": "broken", "order": 2, "symmetric": true, "a": [0.5, 0.5], "b": [0.9]}])";
  const Run invalid = run("schemes validate " + bad.string());
  CHECK(invalid.code == 1);
  CHECK(invalid.err.rfind("error:validation:", 0) == 0);
}

TEST_CASE("schemes efficiency prints JSON") {
  const Run r = run("schemes efficiency strang");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("eff").get<double>() == doctest::Approx(24.0 / std::sqrt(5.0)).epsilon(1e-10));
  CHECK(j.at("q").get<int>() == 1);
}

TEST_CASE("adapt prints c and d, and --check fits an order") {
  const Run r = run("adapt forest-ruth");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.at("c").size() == 3);
  REQUIRE(j.at("d").size() == 3);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += j["c"][i][0].get<double>() + j["d"][i][0].get<double>();
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

  const Run check = run("adapt --check blanes-moan --lambda 3");
  CHECK(check.code == 0);
  CHECK(std::abs(json::parse(check.out).at("fitted_order").get<double>() - 4.0) <= 0.3);

  const Run alt = run("adapt --check lie-trotter --lambda 2 --alternate-reversal");
  CHECK(alt.code == 0);
  CHECK(std::abs(json::parse(alt.out).at("fitted_order").get<double>() - 2.0) <= 0.2);
}

TEST_CASE("zeros prints z and gamma columns") {
  const Run r = run("zeros --family taylor --k 2");
  CHECK(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"z_re", "z_im", "gamma_re", "gamma_im"});
  CHECK(std::stod(rows[1][0]) == -1.0);

  const Run c = run("zeros --family chebyshev --k 10 --gamma-h 5 --axis imaginary");
  CHECK(c.code == 0);
  CHECK(csv_rows(c.out).size() == 11);
}

TEST_CASE("expm reports value, reference and relative error") {
  const Run prod = run("expm --method taylor --k 52 --scalar 5i --prod");
  CHECK(prod.code == 0);
  const json p = json::parse(prod.out);
  CHECK(p.at("relative_error").get<double>() < 1e-13);
  CHECK(p.at("mode") == "prod");

  const Run sum = run("expm --method taylor --k 10 --sum --scalar -1");
  CHECK(sum.code == 0);
  CHECK(json::parse(sum.out).at("mode") == "sum");

  const Run cheb = run("expm --method chebyshev --k 50 --gamma-h 20 --axis imaginary --scalar '(0,7)'");
  CHECK(cheb.code == 0);
  CHECK(json::parse(cheb.out).at("relative_error").get<double>() < 1e-11);

  const Run bad = run("expm --k 5 --scalar abc");
  CHECK(bad.code == 2);
  CHECK(bad.err.rfind("error:usage:", 0) == 0);
  CHECK(run("expm --k 5 --scalar 1 --sum --prod").code == 2);
}

TEST_CASE("model xxz prints the spectrum and writes a dump") {
  const Run r = run("model xxz --L 2 --delta 1");
  CHECK(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(-3.0));
  CHECK(std::stod(rows[4][1]) == doctest::Approx(1.0));

  const fs::path dump = scratch_dir() / "spectrum.csv";
  const Run d = run("model xxz --L 4 --bc periodic --dump " + dump.string());
  CHECK(d.code == 0);
  CHECK(json::parse(d.out).at("dim").get<int>() == 16);
  CHECK(csv_rows(slurp(dump)).size() == 17);

  const Run big = run("model xxz --L 13");
  CHECK(big.code == 1);
  CHECK(big.err.rfind("error:capacity:", 0) == 0);
  CHECK(run("model xxz --bc twisted").code == 2);
}

TEST_CASE("bench writes CSV and plot data deterministically") {
  const fs::path plan = scratch_dir() / "plan.json";
  std::ofstream(plan) << R"({"model": {"L": 4}, "t_total": 1, "h_grid": [0.5, 0.25],
                             "methods": ["strang", "suzuki", "taylor-k16-prod"]})";
  const fs::path a = scratch_dir() / "a.csv", b = scratch_dir() / "b.csv", dat = scratch_dir() / "a.dat";
  const Run r1 = run("bench --no-wall-time --config " + plan.string() + " --out " + a.string() + " --plot-data " +
                     dat.string());
  const Run r2 = run("bench --no-wall-time --config " + plan.string() + " --out " + b.string());
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  CHECK(json::parse(r1.out).at("records") == 6);
  CHECK(slurp(a) == slurp(b));
  const auto rows = csv_rows(slurp(a));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"method", "h", "steps", "cost", "error", "wall_time"});
  CHECK(slurp(dat).find("# suzuki\n") != std::string::npos);

  const Run missing = run("bench --config /nonexistent/plan.json --out " + a.string());
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error:io:", 0) == 0);
  CHECK(run("bench").code == 2);
}

TEST_CASE("probe-stability prints one row per (k, z)") {
  const Run r = run("probe-stability --k 10,20 --z -5,-8");
  CHECK(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"k", "z_re", "z_im", "err_sum", "err_prod"});
  CHECK(std::stod(rows[1][4]) < 1e-13);

  const fs::path out = scratch_dir() / "probe.csv";
  CHECK(run("probe-stability --k 10 --z -5 --out " + out.string()).code == 0);
  CHECK(csv_rows(slurp(out)).size() == 2);
}

TEST_CASE("global options, help, and usage errors") {
  CHECK(run("--help").code == 0);
  for (const char* sub : {"schemes --help", "schemes list --help", "schemes validate --help",
                          "schemes efficiency --help", "adapt --help", "zeros --help", "expm --help",
                          "model --help", "model xxz --help", "bench --help", "probe-stability --help"}) {
    INFO(sub);
    const Run r = run(sub);
    CHECK(r.code == 0);
    CHECK(!r.out.empty());
  }
  const Run unknown = run("schemes list --frobnicate");
  CHECK(unknown.code == 2);
  CHECK(unknown.err.rfind("error:usage:", 0) == 0);
  CHECK(run("").code == 2);

  const Run seeded = run("--seed 42 schemes efficiency suzuki");
  CHECK(seeded.code == 0);
  CHECK(json::parse(seeded.out).at("eff").get<double>() ==
        doctest::Approx(json::parse(run("schemes efficiency suzuki").out).at("eff").get<double>()).epsilon(1e-6));

  const fs::path cat = fs::path(TROTTERKIT_DATA_DIR) / "schemes.json";
  const Run custom = run("--catalog " + cat.string() + " schemes list");
  CHECK(custom.code == 0);
  CHECK(custom.out == run("schemes list").out);
  const Run bad_catalog = run("--catalog /nonexistent/c.json schemes list");
  CHECK(bad_catalog.code == 1);
  CHECK(bad_catalog.err.rfind("error:", 0) == 0);
}

TEST_CASE("identical invocations give byte-identical output") {
  for (const char* args : {"schemes list", "schemes efficiency blanes-moan", "adapt suzuki",
                           "zeros --family taylor --k 12", "expm --k 30 --scalar -3+2i", "model xxz --L 5"}) {
    INFO(args);
    const Run a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

#include "oracles.hpp"
#include "support.hpp"

#include "trotterkit/bessel.hpp"
#include "trotterkit/polyexp.hpp"

#include <filesystem>
#include <fstream>
#include <type_traits>

using namespace trotterkit;
using tk_test::zero_cache;

namespace {

SeriesSpec taylor(int k, double h = 1.0) { return {Family::Taylor, k, 0.0, Axis::Real, h}; }
SeriesSpec chebyshev(int k, double gamma_h, Axis axis) { return {Family::Chebyshev, k, gamma_h, axis, 1.0}; }

template <typename F>
void expect_category(ErrorCategory c, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == c);
  }
}

}  // namespace

TEST_CASE("Bessel values at the origin and a few tabulated points") {
  CHECK(bessel(BesselKind::I, 0, 0.0) == 1.0);
  CHECK(bessel(BesselKind::J, 0, 0.0) == 1.0);
  CHECK(bessel(BesselKind::I, 3, 0.0) == 0.0);
  // I_1(1) from its power series sum (x/2)^{2m+1} / (m! (m+1)!).
  double series = 0.0, term = 0.5;
  for (int m = 0; m < 30; ++m) {
    series += term;
    term *= 0.25 / ((m + 1.0) * (m + 2.0));
  }
  CHECK(bessel(BesselKind::I, 1, 1.0) == doctest::Approx(series).epsilon(1e-15));
  CHECK(series == doctest::Approx(0.5651591040).epsilon(1e-10));
  CHECK(std::abs(bessel(BesselKind::J, 0, 2.404825557695773)) < 1e-10);
}

TEST_CASE("Bessel sequences match trapezoid integrals") {
  for (double x : {0.3, 1.0, 2.5, 7.0, 20.0, 63.5, 100.0, 250.0, 480.0}) {
    const int nmax = static_cast<int>(x) + 40;
    const auto I = bessel_sequence<double>(BesselKind::I, nmax, x);
    const auto J = bessel_sequence<double>(BesselKind::J, nmax, x);
    const int N = 4096 + 8 * static_cast<int>(x);
    for (int n = 0; n <= nmax; n += 1 + nmax / 12) {
      INFO("x=" << x << " n=" << n);
      // The trapezoid rule has an absolute floor near e^x 1e-19, the series does not.
      const double iref = tk_oracle::bessel_I_series(n, x);
      CHECK(std::abs(I[n] - iref) <= 1e-13 * iref);
      CHECK(std::abs(tk_oracle::bessel_I(n, x, N) - iref) <= 1e-13 * iref + 1e-17 * std::exp(x));
      CHECK(std::abs(J[n] - tk_oracle::bessel_J(n, x, N)) <= 1e-13);
    }
  }
}

TEST_CASE("Bessel rejects arguments outside the supported range") {
  expect_category(ErrorCategory::Range, [] { bessel(BesselKind::I, 0, 501.0); });
  expect_category(ErrorCategory::Range, [] { bessel(BesselKind::J, 0, -1.0); });
  expect_category(ErrorCategory::Range, [] { bessel(BesselKind::J, 221, 10.0); });
}

TEST_CASE("Taylor cutoff examples") {
  CHECK(taylor_cutoff(1.0, 1.0, 1e-16) == 18);
  CHECK(taylor_cutoff(0.0, 1.0, 1e-16) == 1);
  // Suppressing (10)^k / (k+1)! below 2.2e-16 needs k = 50.
  CHECK(taylor_cutoff(10.0, 1.0, 2.2e-16) == 50);
  CHECK(tk_oracle::cutoff_brute(10.0, 2.2e-16) == 50);
  CHECK(tk_oracle::cutoff_brute(1.0, 1e-16) == 18);
  CHECK(taylor_cutoff(2.0, 5.0, 2.2e-16) == 50);
}

TEST_CASE("Chebyshev coefficients") {
  const auto zero = chebyshev_coefficients(chebyshev(6, 0.0, Axis::Real));
  CHECK(zero[0] == cplx(1.0));
  for (int n = 1; n <= 6; ++n) CHECK(zero[n] == cplx(0.0));

  const auto one = chebyshev_coefficients(chebyshev(3, 1.0, Axis::Real));
  CHECK(one[0].real() == doctest::Approx(1.2660658777520082).epsilon(1e-15));
  CHECK(one[1].real() == doctest::Approx(1.1303182079849702).epsilon(1e-15));

  const auto imag = chebyshev_coefficients(chebyshev(5, 3.0, Axis::Imaginary));
  const cplx phase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int n = 0; n <= 5; ++n) {
    const cplx expected = (n == 0 ? 1.0 : 2.0) * tk_oracle::bessel_J(n, 3.0) * phase[n % 4];
    CHECK(std::abs(imag[n] - expected) <= 1e-14);
  }
  expect_category(ErrorCategory::Range, [] { chebyshev_coefficients(chebyshev(5, 600.0, Axis::Real)); });
}

TEST_CASE("Chebyshev cutoff at Gamma h = 100 on the imaginary axis") {
  const int k = chebyshev_cutoff(100.0, 1e-14, Axis::Imaginary);
  CHECK(k == 146);
  CHECK(2.0 * std::abs(tk_oracle::bessel_J(k, 100.0, 8192)) >= 1e-14);
  for (int n = k + 1; n <= 260; ++n) CHECK(2.0 * std::abs(tk_oracle::bessel_J(n, 100.0, 8192)) < 1e-14);
}

TEST_CASE("Taylor zeros of low order") {
  const auto z1 = taylor_zeros(1);
  REQUIRE(z1.size() == 1);
  CHECK(std::abs(z1[0] - cplx(-1.0)) <= 1e-15);
  const auto z2 = taylor_zeros(2);
  REQUIRE(z2.size() == 2);
  CHECK(std::abs(z2[0] - cplx(-1.0, 1.0)) <= 1e-15);
  CHECK(std::abs(z2[1] - cplx(-1.0, -1.0)) <= 1e-15);
  expect_category(ErrorCategory::Range, [] { taylor_zeros(0); });
  expect_category(ErrorCategory::Range, [] { taylor_zeros(401); });
}

TEST_CASE("Taylor zeros meet the residual contract and are conjugate-closed") {
  for (int k : {7, 52, 120}) {
    INFO("k=" << k);
    CHECK(zero_residual(taylor(k)) < 1e-25 * k);
    const auto z = taylor_zeros(k, &zero_cache());
    REQUIRE(static_cast<int>(z.size()) == k);
    for (const auto& zi : z) {
      bool found = false;
      for (const auto& zj : z) found |= zj == std::conj(zi);
      CHECK(found);
      CHECK(std::abs(tk_oracle::taylor_sum_ld(k, zi)) <= 1e-9 * std::exp(std::abs(zi)));
    }
  }
}

TEST_CASE("Chebyshev zeros: linear case and residual contract") {
  const auto spec = chebyshev(1, 2.0, Axis::Real);
  const auto mu = chebyshev_coefficients(spec);
  const auto z = chebyshev_zeros(spec);
  REQUIRE(z.size() == 1);
  CHECK(std::abs(z[0] - cplx(-mu[0].real() * 2.0 / mu[1].real())) <= 1e-14);
  CHECK(zero_residual(chebyshev(60, 30.0, Axis::Imaginary)) < 1e-25 * 60);
  CHECK(zero_residual(chebyshev(60, 30.0, Axis::Real)) < 1e-25 * 60);
}

TEST_CASE("Chebyshev factorization at k = 152, Gamma h = 100") {
  SUBCASE("imaginary axis") {
    const auto f = factorize(chebyshev(152, 100.0, Axis::Imaginary), &zero_cache());
    double worst = 0.0;
    for (int j = 0; j <= 400; ++j) {
      const cplx z(0.0, -100.0 + 0.5 * j);
      worst = std::max(worst, tk_test::rel(f.evaluate(z), std::exp(z)));
    }
    CHECK(worst < 1e-11);
  }
  SUBCASE("real axis, relative to the largest value on the interval") {
    const auto spec = chebyshev(152, 100.0, Axis::Real);
    const auto f = factorize(spec, &zero_cache());
    double worst = 0.0;
    for (int j = 0; j <= 400; ++j) {
      const cplx z(-100.0 + 0.5 * j, 0.0);
      worst = std::max(worst, std::abs(f.evaluate(z) - std::exp(z)) / std::exp(100.0));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("order_factors: one conjugate pair becomes one quadratic group") {
  const std::vector<cplx> g{{1, 1}, {1, -1}};
  const auto groups = order_factors(g, 4);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].is_pair);
  CHECK(groups[0].linear == doctest::Approx(2.0 / 4.0));
  CHECK(groups[0].quadratic == doctest::Approx(2.0 / 16.0));
}

TEST_CASE("order_factors: greedy balance on real gammas is pinned") {
  const std::vector<cplx> g{4.0, 3.0, 2.0, 1.0};
  const auto groups = order_factors(g, 4);
  REQUIRE(groups.size() == 4);
  std::vector<double> order;
  for (const auto& grp : groups) order.push_back(grp.gamma.real());
  CHECK(order == std::vector<double>{3.0, 2.0, 4.0, 1.0});
}

TEST_CASE("order_factors: plan is independent of input order and rejects open sets") {
  const auto z = taylor_zeros(52, &zero_cache());
  std::vector<cplx> g;
  for (const auto& zi : z) g.push_back(-52.0 / zi);
  const auto a = order_factors(g, 52);
  std::vector<cplx> shuffled(g.rbegin(), g.rend());
  const auto b = order_factors(shuffled, 52);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].gamma == b[i].gamma);
  expect_category(ErrorCategory::Structural, [] { order_factors(std::vector<cplx>{{1, 1}, {2, -1}}, 2); });
}

TEST_CASE("Taylor k = 52 factorized product reproduces exp at z = 10") {
  const auto f = factorize(taylor(52), &zero_cache());
  CHECK(tk_test::rel(f.evaluate(10.0), std::exp(10.0)) < 5e-13);
  tk_test::Gen gen(52);
  for (int i = 0; i < 200; ++i) {
    const cplx z = gen.in_disk(10.0);
    INFO("z=" << z);
    CHECK(tk_test::rel(f.evaluate(z), std::exp(z)) < 1e-12);
  }
}

TEST_CASE("eval_factorized leaves the target unchanged for H = 0") {
  const auto f = factorize(taylor(20, 0.3), &zero_cache());
  const Eigen::MatrixXd H = Eigen::MatrixXd::Zero(5, 5);
  const Eigen::MatrixXd T = Eigen::MatrixXd::Random(5, 3);
  const auto out = eval_factorized(H, T, f);
  static_assert(std::is_same_v<typename decltype(out)::Scalar, double>, "real inputs stay real");
  CHECK((out - T).norm() <= 1e-15);
}

TEST_CASE("eval_factorized on a scalar operator") {
  const auto f = factorize(taylor(52, 0.5), &zero_cache());
  tk_test::Gen gen(17);
  for (int i = 0; i < 50; ++i) {
    const cplx lambda = gen.in_disk(20.0);  // |lambda h| <= 10
    Eigen::Matrix<cplx, 1, 1> H, t;
    H(0, 0) = lambda;
    t(0, 0) = 1.0;
    CHECK(tk_test::rel(eval_factorized(H, t, f)(0, 0), std::exp(0.5 * lambda)) < 1e-12);
  }
}

TEST_CASE("factorized and summed Taylor agree on a random Hermitian matrix") {
  tk_test::Gen gen(12);
  const MatrixXc A = gen.hermitian(8);
  const MatrixXc G = cplx(0, -1) * A;
  const MatrixXc I = MatrixXc::Identity(8, 8);
  const SeriesSpec spec = taylor(12, 1.0);
  const auto f = factorize(spec, &zero_cache());
  CHECK(frobenius_distance(eval_factorized(G, I, f), eval_summed(G, I, spec)) <= 1e-12);
  CHECK(frobenius_distance(eval_factorized(G, I, f, FactorForm::Linear), eval_summed(G, I, spec)) <= 1e-12);
}

TEST_CASE("direct summation loses the k = 52 series inside its validity disk") {
  const auto f = factorize(taylor(52), &zero_cache());
  const cplx z = -15.0;
  const cplx ref = taylor_polynomial_reference(52, z);
  CHECK(tk_test::rel(evaluate_summed(taylor(52), z), ref) > 1e-6);
  CHECK(tk_test::rel(f.evaluate(z), ref) < 1e-12);
}

TEST_CASE("Chebyshev recurrence reproduces T_2") {
  // With Gamma h = 1 the summed series is mu_0 + mu_1 x + mu_2 (2 x^2 - 1).
  const SeriesSpec spec = chebyshev(2, 1.0, Axis::Real);
  const auto mu = chebyshev_coefficients(spec);
  const double x = 0.5;
  CHECK(2.0 * x * x - 1.0 == -0.5);
  const cplx expected = mu[0] + mu[1] * x + mu[2] * (-0.5);
  CHECK(std::abs(evaluate_summed(spec, x) - expected) <= 1e-15);
}

TEST_CASE("summed and factorized Chebyshev agree at k = 40, Gamma h = 20") {
  const SeriesSpec spec = chebyshev(40, 20.0, Axis::Imaginary);
  const auto f = factorize(spec, &zero_cache());
  for (int j = 0; j < 20; ++j) {
    const cplx z(0.0, -20.0 + 40.0 * j / 19.0);
    INFO("z=" << z);
    CHECK(tk_test::rel(f.evaluate(z), evaluate_summed(spec, z)) < 1e-11);
  }
}

TEST_CASE("zero cache stores 35-digit strings and reloads them") {
  const auto dir = std::filesystem::temp_directory_path() / ("tk-zero-cache-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  const ZeroCache cache(dir);
  CHECK(ZeroCache::key(taylor(52)) == "taylor_52");
  CHECK(ZeroCache::key(chebyshev(152, 100.0, Axis::Imaginary)) == "chebyshev_152_100_imaginary");
  CHECK(ZeroCache::key(chebyshev(8, 1.0 / 3.0, Axis::Real)) == "chebyshev_8_0.333333333_real");

  const auto fresh = taylor_zeros(9, &cache);
  REQUIRE(std::filesystem::exists(cache.path_for(taylor(9))));
  const auto stored = cache.load(taylor(9));
  REQUIRE(stored.has_value());
  CHECK(stored->front().first.size() >= 35);
  const auto cached = taylor_zeros(9, &cache);
  CHECK(cached == fresh);
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    ++files;
    CHECK(e.path().extension() == ".json");
  }
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("quantized Gamma h keeps nine significant digits") {
  CHECK(quantize_gamma_h(100.0) == 100.0);
  CHECK(quantize_gamma_h(1.0 / 3.0) == 0.333333333);
  CHECK(quantize_gamma_h(12.3456789012) == 12.3456789);
}

TEST_CASE("series specs are validated") {
  expect_category(ErrorCategory::Range, [] { taylor(0).validate(); });
  expect_category(ErrorCategory::Range, [] { chebyshev(4, 0.0, Axis::Real).validate(); });
  expect_category(ErrorCategory::Dimension, [] {
    const auto f = factorize(taylor(4), nullptr);
    eval_factorized(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(4, 1), f);
  });
}

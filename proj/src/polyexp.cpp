#include "trotterkit/polyexp.hpp"

#include "mp_roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace trotterkit {

std::string_view family_name(Family f) { return f == Family::Taylor ? "taylor" : "chebyshev"; }
std::string_view axis_name(Axis a) { return a == Axis::Real ? "real" : "imaginary"; }

void SeriesSpec::validate() const {
  if (k < 1) throw Error(ErrorCategory::Range, "series order k must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCategory::Range, "step size h must be positive");
  if (family == Family::Chebyshev && !(gamma_scale > 0.0))
    throw Error(ErrorCategory::Range, "Chebyshev series needs gamma_scale > 0");
}

int taylor_cutoff(double lambda_max, double h, double epsilon) {
  if (lambda_max < 0.0 || !(h > 0.0) || !(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCategory::Range, "taylor_cutoff: need lambda_max >= 0, h > 0, 0 < epsilon < 1");
  const double x = lambda_max * h;
  if (x == 0.0) return 1;
  const double log_x = std::log(x), log_eps = std::log(epsilon);
  for (int k = 1;; ++k)
    if (k * log_x - std::lgamma(k + 2.0) < log_eps) return k;
}

std::vector<cplx> chebyshev_coefficients(const SeriesSpec& spec) {
  if (spec.family != Family::Chebyshev) throw Error(ErrorCategory::Structural, "not a Chebyshev series");
  if (spec.k < 0) throw Error(ErrorCategory::Range, "series order k must be >= 0");
  const double x = spec.gamma_h();
  if (x < 0.0 || x > 500.0) throw Error(ErrorCategory::Range, "Gamma h outside the supported range [0, 500]");
  const auto B = bessel_sequence<double>(spec.axis == Axis::Real ? BesselKind::I : BesselKind::J, spec.k, x);
  static constexpr cplx phase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<cplx> mu(B.size());
  for (std::size_t n = 0; n < B.size(); ++n) {
    const double eps = n == 0 ? 1.0 : 2.0;
    mu[n] = spec.axis == Axis::Real ? cplx(eps * B[n], 0.0) : eps * B[n] * phase[n % 4];
  }
  return mu;
}

int chebyshev_cutoff(double gamma_h, double epsilon, Axis axis) {
  if (!(epsilon > 0.0)) throw Error(ErrorCategory::Range, "epsilon must be positive");
  // Bessel coefficients decay super-exponentially once n exceeds the argument.
  const int nmax = static_cast<int>(std::ceil(gamma_h)) + 200;
  SeriesSpec spec{Family::Chebyshev, nmax, 1.0, axis, gamma_h};
  if (gamma_h == 0.0) return 1;
  const auto mu = chebyshev_coefficients(spec);
  int last = 0;
  for (int j = 0; j <= nmax; ++j)
    if (std::abs(mu[j]) >= epsilon) last = j;
  return std::max(1, last);
}

double quantize_gamma_h(double gamma_h) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", gamma_h);
  return std::strtod(buf, nullptr);
}

namespace {

std::vector<cplx> parse_zeros(const std::vector<std::pair<std::string, std::string>>& digits) {
  std::vector<cplx> out;
  out.reserve(digits.size());
  for (const auto& [re, im] : digits) out.emplace_back(std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr));
  return out;
}

void check_residual(const detail::MpZeros& z, int k) {
  if (!(z.worst_residual < 1e-25 * k)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", z.worst_residual);
    throw Error(ErrorCategory::Convergence, "zero residual " + std::string(buf) + " misses the 1e-25 k target");
  }
}

SeriesSpec chebyshev_key_spec(const SeriesSpec& spec) {
  SeriesSpec s = spec;
  s.gamma_scale = quantize_gamma_h(spec.gamma_h());
  s.h = 1.0;
  return s;
}

}  // namespace

std::vector<cplx> taylor_zeros(int k, const ZeroCache* cache) {
  if (k < 1 || k > 400) throw Error(ErrorCategory::Range, "Taylor zeros need 1 <= k <= 400");
  const SeriesSpec spec{Family::Taylor, k, 0.0, Axis::Real, 1.0};
  if (cache)
    if (auto hit = cache->load(spec)) return parse_zeros(*hit);
  const auto mp = detail::taylor_zeros_mp(k);
  check_residual(mp, k);
  if (cache) cache->store(spec, mp.digits);
  return mp.zeros;
}

std::vector<cplx> chebyshev_zeros(const SeriesSpec& spec, const ZeroCache* cache) {
  spec.validate();
  if (spec.family != Family::Chebyshev) throw Error(ErrorCategory::Structural, "not a Chebyshev series");
  if (spec.k > 400) throw Error(ErrorCategory::Range, "Chebyshev zeros need k <= 400");
  const SeriesSpec keyed = chebyshev_key_spec(spec);
  if (keyed.gamma_h() > 500.0) throw Error(ErrorCategory::Range, "Gamma h outside the supported range [0, 500]");
  if (cache)
    if (auto hit = cache->load(keyed)) return parse_zeros(*hit);
  const auto mp = detail::chebyshev_zeros_mp(keyed.k, keyed.gamma_h(), keyed.axis);
  check_residual(mp, keyed.k);
  if (cache) cache->store(keyed, mp.digits);
  return mp.zeros;
}

double zero_residual(const SeriesSpec& spec) {
  spec.validate();
  if (spec.family == Family::Taylor) return detail::taylor_zeros_mp(spec.k).worst_residual;
  const SeriesSpec keyed = chebyshev_key_spec(spec);
  return detail::chebyshev_zeros_mp(keyed.k, keyed.gamma_h(), keyed.axis).worst_residual;
}

std::vector<FactorGroup> order_factors(std::span<const cplx> gammas, int k) {
  const std::size_t n = gammas.size();
  std::vector<FactorGroup> groups;
  std::vector<bool> used(n, false);
  auto scale_of = [](cplx g) { return std::max(1.0, std::abs(g)); };
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    const cplx g = gammas[i];
    if (std::abs(g.imag()) <= 1e-14 * scale_of(g)) {
      used[i] = true;
      FactorGroup grp;
      grp.gamma = cplx(g.real(), 0.0);
      grp.linear = g.real() / k;
      grp.index = i;
      groups.push_back(grp);
      continue;
    }
    std::size_t partner = n;
    double best = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(gammas[j] - std::conj(g));
      if (partner == n || d < best) {
        partner = j;
        best = d;
      }
    }
    if (partner == n || best > 1e-10 * scale_of(g))
      throw Error(ErrorCategory::Structural, "factor coefficients are not closed under conjugation");
    used[i] = used[partner] = true;
    const std::size_t rep = g.imag() > 0 ? i : partner;
    const cplx r = gammas[rep];
    FactorGroup grp;
    grp.is_pair = true;
    grp.gamma = r;
    grp.linear = 2.0 * r.real() / k;
    grp.quadratic = std::norm(r) / (static_cast<double>(k) * k);
    grp.index = rep;
    groups.push_back(grp);
  }

  // Greedy balance: keep the running sum of Re(gamma) close to total * consumed / count.
  double total = 0.0;
  for (const auto& g : groups) total += g.size() * g.gamma.real();
  const double count = static_cast<double>(n);
  const double tie = 1e-12 * (std::abs(total) + 1.0);
  std::vector<FactorGroup> plan;
  std::vector<bool> taken(groups.size(), false);
  double running = 0.0;
  int consumed = 0;
  for (std::size_t step = 0; step < groups.size(); ++step) {
    std::size_t best = groups.size();
    double best_dist = 0.0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (taken[c]) continue;
      const auto& g = groups[c];
      const double target = total * (consumed + g.size()) / count;
      const double dist = std::abs(running + g.size() * g.gamma.real() - target);
      bool better = best == groups.size() || dist < best_dist - tie;
      if (!better && std::abs(dist - best_dist) <= tie) {
        const double im_c = std::abs(g.gamma.imag()), im_b = std::abs(groups[best].gamma.imag());
        better = im_c < im_b || (im_c == im_b && g.index < groups[best].index);
      }
      if (better) {
        best = c;
        best_dist = dist;
      }
    }
    taken[best] = true;
    running += groups[best].size() * groups[best].gamma.real();
    consumed += groups[best].size();
    plan.push_back(groups[best]);
  }
  return plan;
}

FactorizedPolynomial factorize(const SeriesSpec& spec, const ZeroCache* cache) {
  spec.validate();
  FactorizedPolynomial out;
  out.spec = spec;
  if (spec.family == Family::Taylor) {
    out.zeros = taylor_zeros(spec.k, cache);
    out.overall_scale = 1.0;
  } else {
    out.zeros = chebyshev_zeros(spec, cache);
    const SeriesSpec keyed = chebyshev_key_spec(spec);
    out.overall_scale = detail::chebyshev_value_at_origin(keyed.k, keyed.gamma_h(), keyed.axis);
  }
  const double k = static_cast<double>(spec.k);
  out.gammas.reserve(out.zeros.size());
  for (const auto& z : out.zeros) out.gammas.push_back(-k / z);
  out.groups = order_factors(out.gammas, spec.k);
  return out;
}

cplx FactorizedPolynomial::evaluate(cplx z, FactorForm form) const {
  const double k = static_cast<double>(spec.k);
  cplx v = overall_scale;
  for (const auto& g : groups) {
    if (!g.is_pair)
      v *= 1.0 + g.linear * z;
    else if (form == FactorForm::Quadratic)
      v *= 1.0 + g.linear * z + g.quadratic * z * z;
    else
      v *= (1.0 + g.gamma / k * z) * (1.0 + std::conj(g.gamma) / k * z);
  }
  return v;
}

cplx evaluate_summed(const SeriesSpec& spec, cplx z) {
  Eigen::Matrix<cplx, 1, 1> H, t;
  H(0, 0) = z / spec.h;
  t(0, 0) = 1.0;
  return eval_summed(H, t, spec)(0, 0);
}

cplx taylor_polynomial_reference(int k, cplx z) {
  if (k < 0) throw Error(ErrorCategory::Range, "k must be >= 0");
  return detail::taylor_polynomial_exact(k, z);
}

}  // namespace trotterkit

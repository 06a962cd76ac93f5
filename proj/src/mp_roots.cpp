#include "mp_roots.hpp"

#include "trotterkit/bessel.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace trotterkit::detail {

namespace {

using Real = boost::multiprecision::mpfr_float;

// The MPFR default precision is process-wide; one computation at a time.
std::mutex& precision_mutex() {
  static std::mutex m;
  return m;
}

class PrecisionScope {
 public:
  explicit PrecisionScope(int bits) : lock_(precision_mutex()), saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }

 private:
  std::lock_guard<std::mutex> lock_;
  unsigned saved_;
};

struct C {
  Real re, im;
};

inline C add(const C& a, const C& b) { return {a.re + b.re, a.im + b.im}; }
inline C sub(const C& a, const C& b) { return {a.re - b.re, a.im - b.im}; }
inline C mul(const C& a, const C& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline C divide(const C& a, const C& b) {
  const Real d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline Real abs2(const C& a) { return a.re * a.re + a.im * a.im; }
inline Real cabs(const C& a) { return sqrt(abs2(a)); }

struct PolyEval {
  C p, dp;
};

// Horner for p and p' with real coefficients c[0..k].
PolyEval horner(const std::vector<Real>& c, const C& z) {
  const int k = static_cast<int>(c.size()) - 1;
  C p{c[k], Real(0)};
  C dp{Real(0), Real(0)};
  for (int m = k - 1; m >= 0; --m) {
    dp = add(mul(dp, z), p);
    p = mul(p, z);
    p.re += c[m];
  }
  return {p, dp};
}

std::string digits35(const Real& x) { return x.str(35, std::ios_base::scientific); }

// Aberth-Ehrlich simultaneous iteration for a real-coefficient polynomial in w, followed by
// Newton polishing and exact conjugate symmetrization. `scale` maps w to z = scale * w.
MpZeros aberth(const std::vector<Real>& c, std::vector<std::complex<double>> guesses, double scale, int bits) {
  const int k = static_cast<int>(c.size()) - 1;
  std::vector<C> z(k);
  for (int i = 0; i < k; ++i) z[i] = {Real(guesses[i].real()), Real(guesses[i].imag())};

  // Evaluation noise is amplified by the root conditioning (the extra bits above 160 pay for it),
  // so stop well above the working precision and let the polish steps finish.
  const Real tol = pow(Real(2), -100);
  const int budget = 200;
  int sweep = 0;
  bool converged = false;
  for (; sweep < budget && !converged; ++sweep) {
    Real worst(0);
    for (int i = 0; i < k; ++i) {
      const PolyEval e = horner(c, z[i]);
      if (e.p.re == 0 && e.p.im == 0) continue;
      const C ratio = divide(e.p, e.dp);
      C s{Real(0), Real(0)};
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        const C diff = sub(z[i], z[j]);
        const Real d = abs2(diff);
        s.re += diff.re / d;
        s.im -= diff.im / d;
      }
      const C denom = sub(C{Real(1), Real(0)}, mul(ratio, s));
      const C w = divide(ratio, denom);
      z[i] = sub(z[i], w);
      const Real rel = cabs(w) / (cabs(z[i]) + Real(1e-300));
      if (rel > worst) worst = rel;
    }
    converged = worst < tol;
  }
  if (!converged) {
    throw Error(ErrorCategory::Convergence,
                "Aberth iteration did not converge within " + std::to_string(budget) + " sweeps");
  }
  for (int polish = 0; polish < 2; ++polish)
    for (auto& zi : z) {
      const PolyEval e = horner(c, zi);
      if (e.dp.re != 0 || e.dp.im != 0) zi = sub(zi, divide(e.p, e.dp));
    }

  // Pair each upper-half-plane zero with the nearest lower-half-plane zero.
  const Real real_tol = pow(Real(2), -(bits / 2));
  std::vector<bool> used(k, false);
  std::vector<C> upper, reals;
  for (int i = 0; i < k; ++i)
    if (abs(z[i].im) <= real_tol * (cabs(z[i]) + 1)) {
      reals.push_back({z[i].re, Real(0)});
      used[i] = true;
    }
  for (int i = 0; i < k; ++i) {
    if (used[i] || z[i].im < 0) continue;
    int best = -1;
    Real best_d(0);
    for (int j = 0; j < k; ++j) {
      if (used[j] || j == i || z[j].im >= 0) continue;
      const Real d = abs2(sub(z[j], C{z[i].re, -z[i].im}));
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best < 0 || sqrt(best_d) > Real(1e-20) * (cabs(z[i]) + 1))
      throw Error(ErrorCategory::Convergence, "computed zeros are not closed under conjugation");
    used[i] = used[best] = true;
    upper.push_back({(z[i].re + z[best].re) / 2, (z[i].im - z[best].im) / 2});
  }
  for (int i = 0; i < k; ++i)
    if (!used[i]) throw Error(ErrorCategory::Convergence, "computed zeros are not closed under conjugation");

  // Output order: real zeros, then conjugate pairs (upper member first), by ascending real part.
  auto by_real = [](const C& a, const C& b) { return a.re < b.re || (a.re == b.re && a.im < b.im); };
  std::sort(reals.begin(), reals.end(), by_real);
  std::sort(upper.begin(), upper.end(), by_real);
  std::vector<C> ordered = reals;
  for (const auto& u : upper) {
    ordered.push_back(u);
    ordered.push_back({u.re, -u.im});
  }

  MpZeros out;
  out.sweeps = sweep;
  const Real s(scale);
  for (const auto& zi : ordered) {
    const PolyEval e = horner(c, zi);
    const double residual = static_cast<double>(cabs(divide(e.p, e.dp)) * s);
    out.worst_residual = std::max(out.worst_residual, residual);
    const Real re = zi.re * s, im = zi.im * s;
    out.zeros.emplace_back(static_cast<double>(re), static_cast<double>(im));
    out.digits.emplace_back(digits35(re), digits35(im));
  }
  return out;
}

std::complex<double> szego_guess(double theta, int k) {
  // Solve log w + 1 - w - i theta - log(sqrt(2 pi k) (1 - w)) / k = 0 by Newton.
  using cd = std::complex<double>;
  const double c0 = std::sqrt(2.0 * std::numbers::pi * k);
  cd w = 0.5 * std::exp(cd(0.0, theta));
  if (std::abs(std::abs(theta) - std::numbers::pi) < 1e-12) w = cd(-0.28, theta > 0 ? 1e-3 : -1e-3);
  for (int it = 0; it < 60; ++it) {
    const cd f = std::log(w) + 1.0 - w - cd(0.0, theta) - std::log(c0 * (1.0 - w)) / static_cast<double>(k);
    const cd df = 1.0 / w - 1.0 + 1.0 / (static_cast<double>(k) * (1.0 - w));
    const cd step = f / df;
    w -= step;
    if (std::abs(step) < 1e-14) break;
  }
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || std::abs(w) > 1.5)
    w = 0.5 * std::exp(cd(0.0, theta));
  return w;
}

}  // namespace

MpZeros taylor_zeros_mp(int k) {
  const int bits = 160 + 3 * k / 2;
  PrecisionScope scope(bits);
  // p(k w) = sum_m k^m / m! w^m
  std::vector<Real> c(k + 1);
  c[0] = 1;
  for (int m = 1; m <= k; ++m) c[m] = c[m - 1] * k / m;
  std::vector<std::complex<double>> guesses;
  for (int j = 0; j < k; ++j) {
    const double theta = (k % 2 == 1) ? -std::numbers::pi + 2.0 * std::numbers::pi * j / k
                                      : -std::numbers::pi + 2.0 * std::numbers::pi * (j + 0.5) / k;
    std::complex<double> g = szego_guess(theta, k);
    // Nudge off the real axis so conjugate partners start apart.
    if (std::abs(g.imag()) < 1e-6) g += std::complex<double>(0.0, 1e-3 * (j + 1));
    guesses.push_back(g);
  }
  return aberth(c, guesses, static_cast<double>(k), bits);
}

MpZeros chebyshev_zeros_mp(int k, double gamma_h, Axis axis) {
  const int bits = 160 + 3 * k;
  PrecisionScope scope(bits);
  const Real x(gamma_h);
  const std::vector<Real> B =
      bessel_sequence<Real>(axis == Axis::Real ? BesselKind::I : BesselKind::J, k, x, bits);
  // Monomial coefficients of sum_n eps_n B_n s_{n,m} t_{n,m} w^m with w = z / gamma_h;
  // t_{n,m} are the coefficients of T_n, s = 1 (real axis) or (-1)^{(n-m)/2} (imaginary axis).
  std::vector<Real> c(k + 1, Real(0));
  std::vector<Real> t_prev(k + 1, Real(0)), t_cur(k + 1, Real(0)), t_next(k + 1, Real(0));
  t_prev[0] = 1;  // T_0
  if (k >= 1) t_cur[1] = 1;  // T_1
  auto add_term = [&](int n, const std::vector<Real>& t) {
    const Real weight = (n == 0 ? Real(1) : Real(2)) * B[n];
    for (int m = n % 2; m <= n; m += 2) {
      const bool flip = axis == Axis::Imaginary && ((n - m) / 2) % 2 == 1;
      if (flip)
        c[m] -= weight * t[m];
      else
        c[m] += weight * t[m];
    }
  };
  add_term(0, t_prev);
  if (k >= 1) add_term(1, t_cur);
  for (int n = 2; n <= k; ++n) {
    for (int m = 0; m <= n; ++m) {
      t_next[m] = -t_prev[m];
      if (m > 0) t_next[m] += 2 * t_cur[m - 1];
    }
    add_term(n, t_next);
    std::swap(t_prev, t_cur);
    std::swap(t_cur, t_next);
  }
  // Initial guesses on an ellipse around the approximation interval.
  std::vector<std::complex<double>> guesses;
  const double rho = 0.4;
  for (int j = 0; j < k; ++j) {
    const double phi = 2.0 * std::numbers::pi * (j + 0.5) / k + 0.1 / k;
    std::complex<double> e(std::cosh(rho) * std::cos(phi), std::sinh(rho) * std::sin(phi));
    if (axis == Axis::Imaginary) e *= std::complex<double>(0.0, 1.0);
    guesses.push_back(1.2 * e);
  }
  return aberth(c, guesses, gamma_h, bits);
}

double chebyshev_value_at_origin(int k, double gamma_h, Axis axis) {
  const int bits = 160 + static_cast<int>(std::ceil(1.5 * gamma_h));
  PrecisionScope scope(bits);
  const std::vector<Real> B =
      bessel_sequence<Real>(axis == Axis::Real ? BesselKind::I : BesselKind::J, k, Real(gamma_h), bits);
  // T_n(0) = (-1)^{n/2} for even n. On the imaginary axis mu_n carries i^n, which cancels the sign.
  Real sum(0);
  for (int n = 0; n <= k; n += 2) {
    const Real term = (n == 0 ? Real(1) : Real(2)) * B[n];
    const bool negative = axis == Axis::Real && (n / 2) % 2 == 1;
    sum += negative ? Real(-term) : term;
  }
  return static_cast<double>(sum);
}

cplx taylor_polynomial_exact(int k, cplx z) {
  PrecisionScope scope(160 + 4 * k);
  const C zz{Real(z.real()), Real(z.imag())};
  C term{Real(1), Real(0)};
  C sum = term;
  for (int i = 1; i <= k; ++i) {
    term = mul(term, zz);
    term.re /= i;
    term.im /= i;
    sum = add(sum, term);
  }
  return {static_cast<double>(sum.re), static_cast<double>(sum.im)};
}

}  // namespace trotterkit::detail

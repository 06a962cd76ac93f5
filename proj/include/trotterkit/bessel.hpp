#pragma once

#include "trotterkit/core.hpp"

#include <cmath>
#include <vector>

namespace trotterkit {

enum class BesselKind { I, J };

/// Bessel functions of the first kind (ordinary J or modified I) for orders 0..nmax at x >= 0.
///
/// Small arguments (x <= 1) use the power series. Otherwise the sequence comes from
/// Miller's downward recurrence started well above max(nmax, x) and normalized with
///   I: I_0(x) + 2 sum_{n>=1} I_n(x) = e^x
///   J: J_0(x) + 2 sum_{m>=1} J_{2m}(x) = 1.
/// `Real` may be double or a multiprecision type; `bits` is its significand precision.
template <typename Real>
std::vector<Real> bessel_sequence(BesselKind kind, int nmax, const Real& x, int bits = 53) {
  using std::abs;
  using std::exp;
  using std::pow;
  if (nmax < 0) throw Error(ErrorCategory::Range, "bessel: negative order");
  if (x < 0 || x > 500) throw Error(ErrorCategory::Range, "bessel: argument outside [0, 500]");
  std::vector<Real> out(static_cast<std::size_t>(nmax) + 1, Real(0));
  if (x == 0) {
    out[0] = Real(1);
    return out;
  }
  const Real eps = pow(Real(2), -bits);
  if (x <= 1) {
    const Real half = x / 2;
    const Real q = (kind == BesselKind::I ? Real(1) : Real(-1)) * half * half;
    Real lead = Real(1);  // (x/2)^n / n!
    for (int n = 0; n <= nmax; ++n) {
      if (n > 0) lead = lead * half / n;
      if (lead == 0) break;
      Real term = lead, sum = lead;
      for (int m = 1; m < 10000; ++m) {
        term = term * q / (static_cast<double>(m) * static_cast<double>(m + n));
        sum += term;
        if (abs(term) <= eps * abs(sum)) break;
      }
      out[n] = sum;
    }
    return out;
  }

  const double xd = static_cast<double>(x);
  const int start = std::max(nmax, static_cast<int>(std::ceil(xd))) + 40 + bits +
                    static_cast<int>(std::ceil(2.0 * std::cbrt(xd) * std::sqrt(static_cast<double>(bits))));
  const Real big = Real(1e250);
  const Real sign = kind == BesselKind::I ? Real(1) : Real(-1);
  Real f_next = Real(0);  // f_{n+1}
  Real f = Real(1e-30);   // f_n
  Real norm_sum = Real(0);
  for (int n = start; n >= 1; --n) {
    const Real f_prev = (2.0 * n) / x * f + sign * f_next;  // f_{n-1}
    f_next = f;
    f = f_prev;
    const int idx = n - 1;
    if (idx <= nmax) out[idx] = f;
    if (kind == BesselKind::I) {
      if (idx >= 1) norm_sum += 2 * f;
    } else if (idx >= 2 && idx % 2 == 0) {
      norm_sum += 2 * f;
    }
    if (abs(f) > big) {
      const Real s = 1 / big;
      f *= s;
      f_next *= s;
      norm_sum *= s;
      for (int j = idx; j <= nmax; ++j) out[j] *= s;
    }
  }
  norm_sum += f;  // n = 0 term
  const Real scale = kind == BesselKind::I ? exp(x) / norm_sum : Real(1) / norm_sum;
  for (auto& v : out) v *= scale;
  return out;
}

/// Single value; order must not exceed 2x + 200.
double bessel(BesselKind kind, int order, double x);

}  // namespace trotterkit

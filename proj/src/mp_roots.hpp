#pragma once

#include "trotterkit/polyexp.hpp"

#include <string>
#include <vector>

namespace trotterkit::detail {

/// Zeros computed in multiprecision, with decimal renderings of the extended-precision values.
struct MpZeros {
  std::vector<cplx> zeros;
  std::vector<std::pair<std::string, std::string>> digits;  // 35 significant digits, (re, im)
  double worst_residual = 0.0;                               // max |p(z)/p'(z)| in z units
  int sweeps = 0;
};

/// All k zeros of sum_{i<=k} z^i / i!.
MpZeros taylor_zeros_mp(int k);

/// All k zeros of sum_{n<=k} mu_n T_n(z / c), c = gamma_h (real axis) or i gamma_h (imaginary axis).
MpZeros chebyshev_zeros_mp(int k, double gamma_h, Axis axis);

/// sum_{n<=k} mu_n T_n(0) for the same series. On the real axis the terms reach e^{gamma_h}
/// while the sum is O(1), so this needs more than double precision.
double chebyshev_value_at_origin(int k, double gamma_h, Axis axis);

/// Exact value of the truncated Taylor sum at z, evaluated in multiprecision and rounded.
cplx taylor_polynomial_exact(int k, cplx z);

}  // namespace trotterkit::detail

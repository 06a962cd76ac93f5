#include "trotterkit/bessel.hpp"

namespace trotterkit {

double bessel(BesselKind kind, int order, double x) {
  if (order < 0 || x < 0.0 || x > 500.0 || order > 2.0 * x + 200.0)
    throw Error(ErrorCategory::Range, "bessel: need 0 <= x <= 500 and 0 <= order <= 2x + 200");
  return bessel_sequence<double>(kind, order, x).back();
}

}  // namespace trotterkit

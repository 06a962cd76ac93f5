#pragma once

#include "trotterkit/bessel.hpp"
#include "trotterkit/core.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace trotterkit {

enum class Family { Taylor, Chebyshev };
enum class Axis { Real, Imaginary };

std::string_view family_name(Family f);
std::string_view axis_name(Axis a);

/// Truncated series for exp(h H). Chebyshev series live on [-Gamma h, Gamma h] along `axis`.
struct SeriesSpec {
  Family family = Family::Taylor;
  int k = 1;
  double gamma_scale = 0.0;  // Gamma, Chebyshev only
  Axis axis = Axis::Real;    // Chebyshev only
  double h = 1.0;

  double gamma_h() const { return gamma_scale * h; }
  void validate() const;
};

/// One evaluation group: a conjugate pair as the real quadratic
///   1 + linear * X + quadratic * X^2,  linear = 2 Re(gamma)/k, quadratic = |gamma|^2/k^2,
/// or a real singleton 1 + linear * X.
struct FactorGroup {
  bool is_pair = false;
  cplx gamma;               // representative (Im >= 0 for pairs)
  double linear = 0.0;
  double quadratic = 0.0;
  std::size_t index = 0;    // position of `gamma` in the input list
  int size() const { return is_pair ? 2 : 1; }
};

enum class FactorForm {
  Quadratic,  // conjugate pairs as real quadratics
  Linear,     // every zero as its own complex linear factor (needs a complex scalar)
};

/// p(z) = overall_scale * prod_i (1 + gamma_i z / k), gamma_i = -k / z_i.
struct FactorizedPolynomial {
  SeriesSpec spec;
  std::vector<cplx> zeros;
  std::vector<cplx> gammas;
  std::vector<FactorGroup> groups;
  double overall_scale = 1.0;

  /// p(z) for the full argument z = h * lambda.
  cplx evaluate(cplx z, FactorForm form = FactorForm::Quadratic) const;
};

/// Disk cache of zeros: <dir>/<family>_<k>[_<gamma_h>_<axis>].json holding [["re","im"],...]
/// as 35-digit decimal strings. Files appear atomically (write to a temporary, then rename).
class ZeroCache {
 public:
  explicit ZeroCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  static std::string key(const SeriesSpec& spec);
  std::filesystem::path path_for(const SeriesSpec& spec) const;
  std::optional<std::vector<std::pair<std::string, std::string>>> load(const SeriesSpec& spec) const;
  void store(const SeriesSpec& spec, const std::vector<std::pair<std::string, std::string>>& zeros) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Smallest k >= 1 with |(lambda_max h)^k / (k+1)!| < epsilon.
int taylor_cutoff(double lambda_max, double h, double epsilon);

/// mu_0..mu_k: real axis mu_n = eps_n I_n(Gamma h); imaginary axis mu_n = eps_n i^n J_n(Gamma h)
/// (eps_0 = 1, eps_n = 2), so that sum mu_n T_n(z / c) ~ exp(z) with c = Gamma h or i Gamma h.
/// Throws Error(Range) for Gamma h > 500.
std::vector<cplx> chebyshev_coefficients(const SeriesSpec& spec);

/// Smallest k >= 1 such that |mu_j| < epsilon for every j > k.
int chebyshev_cutoff(double gamma_h, double epsilon, Axis axis);

/// Zeros of the truncated Taylor series, 1 <= k <= 400, computed with Aberth-Ehrlich iteration
/// in multiprecision. Throws Error(Convergence) if the residual contract is missed.
std::vector<cplx> taylor_zeros(int k, const ZeroCache* cache = nullptr);

/// Zeros of sum mu_n T_n(z / c) as a polynomial in z.
std::vector<cplx> chebyshev_zeros(const SeriesSpec& spec, const ZeroCache* cache = nullptr);

/// Worst |p(z)/p'(z)| reached by a fresh (uncached) zero computation.
double zero_residual(const SeriesSpec& spec);

/// Evaluation plan: conjugate pairs merged into quadratic groups, real gammas as singletons,
/// ordered greedily so the running sum of Re(gamma) tracks the straight line
/// total * (factors consumed) / (factor count). Ties: smaller |Im gamma|, then lower index.
/// Throws Error(Structural) if the input is not closed under conjugation.
std::vector<FactorGroup> order_factors(std::span<const cplx> gammas, int k);

/// Zeros, gammas and evaluation plan for a series.
FactorizedPolynomial factorize(const SeriesSpec& spec, const ZeroCache* cache = nullptr);

/// Rounds Gamma h to 9 significant digits (zero-cache key granularity).
double quantize_gamma_h(double gamma_h);

namespace detail {

template <typename Derived>
void check_operands(const Eigen::MatrixBase<Derived>& target, Eigen::Index dim) {
  if (target.rows() != dim) throw Error(ErrorCategory::Dimension, "operator and target dimensions differ");
}

}  // namespace detail

/// Applies the factor groups of `fact` to `target` with the already scaled argument X = h H.
template <typename DerivedX, typename DerivedT>
auto apply_factors(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedT>& target,
                   const FactorizedPolynomial& fact, FactorForm form = FactorForm::Quadratic) {
  using Scalar =
      typename Eigen::ScalarBinaryOpTraits<typename DerivedX::Scalar, typename DerivedT::Scalar>::ReturnType;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, DerivedT::ColsAtCompileTime>;
  if (X.rows() != X.cols()) throw Error(ErrorCategory::Dimension, "operator must be square");
  detail::check_operands(target, X.rows());
  Result v = target.template cast<Scalar>();
  const double k = static_cast<double>(fact.spec.k);
  for (const auto& g : fact.groups) {
    if (!g.is_pair) {
      v += g.linear * (X * v).eval();
    } else if (form == FactorForm::Quadratic) {
      const Result Xv = X * v;
      v += g.linear * Xv + g.quadratic * (X * Xv).eval();
    } else {
      if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
        const Scalar c1 = Scalar(g.gamma / k);
        const Scalar c2 = Scalar(std::conj(g.gamma) / k);
        v += c1 * (X * v).eval();
        v += c2 * (X * v).eval();
      } else {
        throw Error(ErrorCategory::Structural, "linear factor form needs complex arithmetic");
      }
    }
  }
  v *= fact.overall_scale;
  return v;
}

/// exp(h H) target through the zero factorization.
template <typename DerivedH, typename DerivedT>
auto eval_factorized(const Eigen::MatrixBase<DerivedH>& H, const Eigen::MatrixBase<DerivedT>& target,
                     const FactorizedPolynomial& fact, FactorForm form = FactorForm::Quadratic) {
  const MatrixX<typename DerivedH::Scalar> X = fact.spec.h * H;
  return apply_factors(X, target, fact, form);
}

/// exp(h H) target by direct summation: running Taylor terms, or the Chebyshev three-term
/// recurrence T_{n+1} = 2 Y T_n - T_{n-1} with Y = h H / c. Unstable for large Taylor k.
template <typename DerivedH, typename DerivedT>
auto eval_summed(const Eigen::MatrixBase<DerivedH>& H, const Eigen::MatrixBase<DerivedT>& target,
                 const SeriesSpec& spec) {
  using Scalar =
      typename Eigen::ScalarBinaryOpTraits<typename DerivedH::Scalar, typename DerivedT::Scalar>::ReturnType;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, DerivedT::ColsAtCompileTime>;
  if (H.rows() != H.cols()) throw Error(ErrorCategory::Dimension, "operator must be square");
  detail::check_operands(target, H.rows());
  spec.validate();
  const MatrixX<Scalar> X = (spec.h * H).template cast<Scalar>();
  Result sum = target.template cast<Scalar>();
  if (spec.family == Family::Taylor) {
    Result term = sum;
    for (int i = 1; i <= spec.k; ++i) {
      term = (X * term).eval() / static_cast<double>(i);
      sum += term;
    }
    return sum;
  }
  const auto mu = chebyshev_coefficients(spec);
  auto coef = [&](int n) -> Scalar {
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
      return Scalar(mu[n]);
    } else {
      if (mu[n].imag() != 0.0) throw Error(ErrorCategory::Structural, "imaginary-axis series needs complex arithmetic");
      return Scalar(mu[n].real());
    }
  };
  MatrixX<Scalar> Y;
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    const Scalar c = spec.axis == Axis::Real ? Scalar(spec.gamma_h()) : Scalar(cplx(0.0, spec.gamma_h()));
    Y = X / c;
  } else {
    if (spec.axis == Axis::Imaginary)
      throw Error(ErrorCategory::Structural, "imaginary-axis series needs complex arithmetic");
    Y = X / spec.gamma_h();
  }
  Result t_prev = sum;
  sum = coef(0) * t_prev;
  if (spec.k == 0) return sum;
  Result t_cur = Y * t_prev;
  sum += coef(1) * t_cur;
  for (int n = 2; n <= spec.k; ++n) {
    Result t_next = 2.0 * (Y * t_cur).eval() - t_prev;
    sum += coef(n) * t_next;
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  return sum;
}

/// Scalar summed series at the full argument z = h * lambda.
cplx evaluate_summed(const SeriesSpec& spec, cplx z);

/// Truncated Taylor sum at z evaluated in multiprecision (reference for round-off studies).
cplx taylor_polynomial_reference(int k, cplx z);

}  // namespace trotterkit

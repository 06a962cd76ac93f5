#pragma once

#include "trotterkit/linalg.hpp"
#include "trotterkit/schemes.hpp"

#include <map>
#include <optional>
#include <utility>

namespace trotterkit {

/// Coefficients (c_i, d_i) for Lambda operators: ascending products with c_i alternate with
/// descending products with d_i.
struct MultiStageScheme {
  std::string name;
  int order = 0;
  std::vector<cplx> c;
  std::vector<cplx> d;
  std::string source_scheme;

  int cycles() const { return static_cast<int>(c.size()); }
  /// Coefficients of the exactly reversed exponential sequence: c' = reverse(d), d' = reverse(c).
  MultiStageScheme reversed() const;
  bool is_palindromic(double tolerance = tol::symmetry) const;
};

/// c1 = a1, d1 = b1 - c1, c_i = a_i - d_{i-1}, d_i = b_i - c_i.
/// Throws Error(Validation) for inconsistent schemes.
MultiStageScheme to_multistage(const TwoStageScheme& scheme);

/// Inverse map: a1 = c1, b_i = c_i + d_i, a_{i+1} = d_i + c_{i+1} (c_{q+1} = 0).
TwoStageScheme to_two_stage(const MultiStageScheme& ms);

/// Two-site term acting on sites (site_a, site_b); basis index bit s is the state of site s.
struct LocalTerm {
  int site_a = 0;
  int site_b = 1;
  Eigen::Matrix4cd matrix;
};

/// Hamiltonian H = sum_k parts[k] as Lambda dense Hermitian blocks. Parts built from mutually
/// commuting two-site terms may also carry those terms for the lifted exponential path.
struct OperatorSplit {
  int dim = 0;
  std::vector<MatrixXc> parts;
  MatrixXc total;
  std::vector<std::vector<LocalTerm>> local_terms;  // empty or one list per part
  int sites = 0;

  /// Validates dimensions and hermiticity, forms the total.
  static OperatorSplit from_parts(std::vector<MatrixXc> parts);
  int stages() const { return static_cast<int>(parts.size()); }
  bool has_local_terms() const { return !local_terms.empty(); }
};

enum class ExponentialPath {
  Auto,    // lifted two-site gates when available and dim > 512, dense otherwise
  Dense,   // Hermitian eigendecomposition of the whole part
  Lifted,  // product of lifted two-site exponentials (requires local terms)
};

/// Per-part exponentials exp(s * part), cached by s. Not shared across threads.
class ExponentialCache {
 public:
  ExponentialCache(const OperatorSplit& split, ExponentialPath path = ExponentialPath::Auto);
  const MatrixXc& exp(int part, cplx s);

 private:
  MatrixXc lifted_exp(int part, cplx s) const;

  const OperatorSplit& split_;
  ExponentialPath path_;
  std::vector<std::optional<HermitianSpectrum>> spectra_;
  std::vector<std::map<std::pair<double, double>, MatrixXc>> cache_;
};

/// exp(A a1 g h) exp(B b1 g h) ... exp(A a_{q+1} g h) with g = generator(direction).
MatrixXc apply_two_stage(const MatrixXc& A, const MatrixXc& B, const TwoStageScheme& scheme, double h,
                         Direction direction = Direction::RealTime);

/// One step of the Lambda-operator decomposition; adjacent exponentials of the same part merge.
MatrixXc apply_multistage(const OperatorSplit& split, const MultiStageScheme& ms, double h,
                          Direction direction = Direction::RealTime,
                          ExponentialPath path = ExponentialPath::Auto);
MatrixXc apply_multistage(ExponentialCache& cache, const OperatorSplit& split, const MultiStageScheme& ms, double h,
                          Direction direction = Direction::RealTime);

/// `steps` applications of apply_multistage; with alternate_reversal every second step uses the
/// reversed coefficient sequence.
MatrixXc evolve(const OperatorSplit& split, const MultiStageScheme& ms, double h, long steps,
                bool alternate_reversal, Direction direction = Direction::RealTime,
                ExponentialPath path = ExponentialPath::Auto);

/// Global-error order at t = 1 of the Lambda-stage decomposition on `split`.
double empirical_order(const OperatorSplit& split, const MultiStageScheme& ms, std::span<const double> h_grid,
                       bool alternate_reversal = false);

/// Lambda random Hermitian parts of dimension dim (spectral norm 1 each).
OperatorSplit random_split(int stages, int dim, std::uint64_t seed);

}  // namespace trotterkit

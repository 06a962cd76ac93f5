#pragma once

#include "trotterkit/core.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trotterkit {

/// Two-operator decomposition exp(A a1 h) exp(B b1 h) ... exp(B bq h) exp(A a_{q+1} h).
struct TwoStageScheme {
  std::string name;
  int order = 0;
  std::vector<cplx> a;  // q + 1 entries
  std::vector<cplx> b;  // q entries
  bool symmetric = false;
  std::string source;

  int cycles() const { return static_cast<int>(b.size()); }
  bool is_real() const;
  /// Same decomposition applied in reverse operator order.
  TwoStageScheme reversed() const;
};

struct ValidationReport {
  cplx residual_a;  // sum(a) - 1
  cplx residual_b;  // sum(b) - 1
  bool consistent = false;
  bool symmetry_ok = true;  // palindromic coefficients when the scheme claims symmetry

  bool passed() const { return consistent && symmetry_ok; }
};

/// Throws Error(Structural) when len(a) != len(b) + 1 or q < 1.
ValidationReport validate_consistency(const TwoStageScheme& scheme);

/// Leading error operators in the commutator basis
///   ord1 = (nu-1) A + (sigma-1) B
///   ord3 = alpha [A,[A,B]] + beta [B,[A,B]]
///   ord5 = sum_j gamma_j C_j  with C_1..C_6 = [A,[A,[A,[A,B]]]], [A,[A,[B,[A,B]]]],
///          [B,[A,[A,[A,B]]]], [B,[B,[B,[A,B]]]], [B,[B,[A,[A,B]]]], [A,[B,[B,[A,B]]]]
/// second_order is the [A,B] coefficient, nonzero only for non-symmetric schemes.
struct ErrorCoefficients {
  cplx nu_minus_1;
  cplx sigma_minus_1;
  cplx second_order;
  cplx alpha;
  cplx beta;
  std::array<cplx, 6> gamma{};
  bool has_gamma = false;
  double spread = 0.0;    // max deviation of a single draw from the mean
  double residual = 0.0;  // worst relative projection residual over draws

  double third_order_norm() const;
  double fifth_order_norm() const;
};

enum class ProbeKind {
  /// Graded nilpotent operators: exp and log are finite sums, grades separate exactly.
  Nilpotent,
  /// Random Hermitian operators, matrix logarithm and Richardson elimination in h.
  Hermitian,
};

struct ErrorEstimateOptions {
  int max_order = 5;  // 3 or 5
  int draws = 5;
  std::uint64_t seed = 20221103;
  ProbeKind probe = ProbeKind::Nilpotent;
  int dim = 8;  // Hermitian probes; nilpotent probes use 6 levels of dim/2 (at least 2)
};

ErrorCoefficients estimate_error_coefficients(const TwoStageScheme& scheme,
                                              const ErrorEstimateOptions& options = {});

/// Single-draw Hermitian-route estimate with caller-supplied Hermitian operators.
/// Throws Error(DegenerateDraw) when the commutator basis is (numerically) degenerate.
ErrorCoefficients project_error(const TwoStageScheme& scheme, const MatrixXc& A, const MatrixXc& B,
                                int max_order = 5);

struct EfficiencyScore {
  int order = 0;
  int q = 0;
  double eff = 0.0;
  double leading_error = 0.0;
  bool order_underclaimed = false;  // leading error numerically zero
};

/// Eff_n = 1 / (q^n * |leading error|); n = 1 uses [A,B], n = 2 uses (alpha, beta), n = 4 the gammas.
EfficiencyScore efficiency(const TwoStageScheme& scheme, const ErrorCoefficients& coefficients);
EfficiencyScore efficiency(const TwoStageScheme& scheme, const ErrorEstimateOptions& options = {});

/// Least-squares slope of log(error) against log(h); points below `floor` are dropped.
/// Throws Error(GridUnusable) when fewer than three points remain.
double fit_loglog_slope(std::span<const double> h, std::span<const double> error,
                        double floor = tol::error_floor);

/// Global-error order at t = 1 on random Hermitian A, B of dimension `dim`.
double empirical_order(const TwoStageScheme& scheme, int dim, std::span<const double> h_grid,
                       std::uint64_t seed = 7);

/// Default geometric grid used for order checks of catalog entries.
std::vector<double> default_order_grid();

}  // namespace trotterkit

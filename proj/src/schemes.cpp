#include "trotterkit/schemes.hpp"

#include "trotterkit/linalg.hpp"
#include "trotterkit/multistage.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace trotterkit {

bool TwoStageScheme::is_real() const {
  auto real = [](const cplx& c) { return c.imag() == 0.0; };
  return std::all_of(a.begin(), a.end(), real) && std::all_of(b.begin(), b.end(), real);
}

TwoStageScheme TwoStageScheme::reversed() const {
  TwoStageScheme r = *this;
  std::reverse(r.a.begin(), r.a.end());
  std::reverse(r.b.begin(), r.b.end());
  r.name = name + "-reversed";
  return r;
}

ValidationReport validate_consistency(const TwoStageScheme& scheme) {
  if (scheme.b.empty() || scheme.a.size() != scheme.b.size() + 1)
    throw Error(ErrorCategory::Structural,
                "scheme '" + scheme.name + "': expected len(a) = len(b) + 1 with len(b) >= 1, got len(a) = " +
                    std::to_string(scheme.a.size()) + ", len(b) = " + std::to_string(scheme.b.size()));
  ValidationReport report;
  report.residual_a = std::accumulate(scheme.a.begin(), scheme.a.end(), cplx(0.0)) - 1.0;
  report.residual_b = std::accumulate(scheme.b.begin(), scheme.b.end(), cplx(0.0)) - 1.0;
  report.consistent = std::abs(report.residual_a) < tol::consistency && std::abs(report.residual_b) < tol::consistency;
  if (scheme.symmetric) {
    auto palindromic = [](const std::vector<cplx>& v) {
      for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - v[v.size() - 1 - i]) > tol::symmetry) return false;
      return true;
    };
    report.symmetry_ok = palindromic(scheme.a) && palindromic(scheme.b);
  }
  return report;
}

double ErrorCoefficients::third_order_norm() const {
  return std::sqrt(std::norm(alpha) + std::norm(beta));
}

double ErrorCoefficients::fifth_order_norm() const {
  double s = 0.0;
  for (const auto& g : gamma) s += std::norm(g);
  return std::sqrt(s);
}

namespace {

MatrixXc comm(const MatrixXc& X, const MatrixXc& Y) { return X * Y - Y * X; }

struct CommutatorBasis {
  std::vector<MatrixXc> grade1, grade2, grade3, grade4, grade5;
};

CommutatorBasis commutator_basis(const MatrixXc& A, const MatrixXc& B, int max_order) {
  CommutatorBasis basis;
  basis.grade1 = {A, B};
  const MatrixXc AB = comm(A, B);
  basis.grade2 = {AB};
  const MatrixXc AAB = comm(A, AB);
  const MatrixXc BAB = comm(B, AB);
  basis.grade3 = {AAB, BAB};
  if (max_order >= 5) {
    const MatrixXc AAAB = comm(A, AAB);
    basis.grade4 = {AAAB, comm(B, AAB), comm(B, BAB)};
    basis.grade5 = {
        comm(A, AAAB),               // [A,[A,[A,[A,B]]]]
        comm(A, comm(A, BAB)),       // [A,[A,[B,[A,B]]]]
        comm(B, AAAB),               // [B,[A,[A,[A,B]]]]
        comm(B, comm(B, BAB)),       // [B,[B,[B,[A,B]]]]
        comm(B, comm(B, AAB)),       // [B,[B,[A,[A,B]]]]
        comm(A, comm(B, BAB)),       // [A,[B,[B,[A,B]]]]
    };
  }
  return basis;
}

struct Projection {
  VectorXc coefficients;
  double residual = 0.0;  // norm of the component orthogonal to the basis
  double norm = 0.0;      // norm of the projected operator
};

// Least-squares fit of E onto span(basis). `scale` sets the level below which E counts as zero.
Projection project(const MatrixXc& E, const std::vector<MatrixXc>& basis, double scale) {
  const Eigen::Index n = E.size();
  MatrixXc M(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    M.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const VectorXc>(basis[j].data(), n);
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    if (M.col(j).norm() <= 1e-10 * scale)
      throw Error(ErrorCategory::DegenerateDraw, "commutator basis element vanishes for this draw");
  Eigen::ColPivHouseholderQR<MatrixXc> qr(M);
  qr.setThreshold(1e-10);
  if (qr.rank() < M.cols())
    throw Error(ErrorCategory::DegenerateDraw, "commutator basis is linearly dependent for this draw");
  const VectorXc e = Eigen::Map<const VectorXc>(E.data(), n);
  Projection p;
  p.coefficients = qr.solve(e);
  p.norm = e.norm();
  p.residual = (M * p.coefficients - e).norm();
  return p;
}

// Block-offset component of a graded matrix: blocks (j + grade, j).
MatrixXc grade_part(const MatrixXc& M, int grade, int levels, int block) {
  MatrixXc out = MatrixXc::Zero(M.rows(), M.cols());
  for (int j = 0; j + grade < levels; ++j)
    out.block((j + grade) * block, j * block, block, block) = M.block((j + grade) * block, j * block, block, block);
  return out;
}

MatrixXc nilpotent_exp(const MatrixXc& N, int levels) {
  MatrixXc result = MatrixXc::Identity(N.rows(), N.cols());
  MatrixXc term = result;
  for (int n = 1; n < levels; ++n) {
    term = term * N / static_cast<double>(n);
    result += term;
  }
  return result;
}

MatrixXc unipotent_log(const MatrixXc& S, int levels) {
  const MatrixXc N = S - MatrixXc::Identity(S.rows(), S.cols());
  MatrixXc result = MatrixXc::Zero(S.rows(), S.cols());
  MatrixXc power = MatrixXc::Identity(S.rows(), S.cols());
  for (int n = 1; n < levels; ++n) {
    power = power * N;
    result += ((n % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(n) * power;
  }
  return result;
}

struct GradedError {
  std::array<MatrixXc, 6> grade;  // index = power of h
};

void fill_coefficients(ErrorCoefficients& out, const GradedError& E, const CommutatorBasis& basis, int max_order,
                       double scale) {
  const Projection p1 = project(E.grade[1], basis.grade1, scale);
  out.nu_minus_1 = p1.coefficients(0);
  out.sigma_minus_1 = p1.coefficients(1);
  const Projection p2 = project(E.grade[2], basis.grade2, scale);
  out.second_order = p2.coefficients(0);
  const Projection p3 = project(E.grade[3], basis.grade3, scale);
  out.alpha = p3.coefficients(0);
  out.beta = p3.coefficients(1);
  std::vector<Projection> grades{p1, p2, p3};
  if (max_order >= 5) {
    grades.push_back(project(E.grade[4], basis.grade4, scale));
    grades.push_back(project(E.grade[5], basis.grade5, scale));
    for (int j = 0; j < 6; ++j) out.gamma[j] = grades[4].coefficients(j);
    out.has_gamma = true;
  }
  // Each grade is judged against its own size, except grades that (should) vanish: those are
  // judged against the whole error operator so fit noise does not read as a basis mismatch.
  double total = 0.0;
  for (const auto& g : grades) total += g.norm * g.norm;
  total = std::sqrt(total);
  out.residual = 0.0;
  if (total > 1e-13 * scale)
    for (const auto& g : grades) out.residual = std::max(out.residual, g.residual / std::max(g.norm, 1e-6 * total));
  if (out.residual > tol::degenerate_residual)
    throw Error(ErrorCategory::DegenerateDraw,
                "projection residual " + format_double(out.residual) + " exceeds 10% of the error operator");
}

ErrorCoefficients nilpotent_draw(const TwoStageScheme& scheme, int max_order, int block, std::mt19937_64& rng) {
  const int levels = max_order + 1;
  const int dim = levels * block;
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXc A = MatrixXc::Zero(dim, dim);
  MatrixXc B = MatrixXc::Zero(dim, dim);
  for (int j = 0; j + 1 < levels; ++j)
    for (int r = 0; r < block; ++r)
      for (int c = 0; c < block; ++c) {
        A((j + 1) * block + r, j * block + c) = cplx(normal(rng), normal(rng));
        B((j + 1) * block + r, j * block + c) = cplx(normal(rng), normal(rng));
      }
  MatrixXc S = MatrixXc::Identity(dim, dim);
  for (int i = 0; i < scheme.cycles(); ++i) {
    S = S * nilpotent_exp(scheme.a[i] * A, levels);
    S = S * nilpotent_exp(scheme.b[i] * B, levels);
  }
  S = S * nilpotent_exp(scheme.a.back() * A, levels);
  const MatrixXc E = unipotent_log(S, levels) - (A + B);

  GradedError graded;
  for (int g = 1; g <= max_order; ++g) graded.grade[g] = grade_part(E, g, levels, block);
  for (int g = max_order + 1; g < 6; ++g) graded.grade[g] = MatrixXc::Zero(dim, dim);

  ErrorCoefficients out;
  fill_coefficients(out, graded, commutator_basis(A, B, max_order), max_order, A.norm() + B.norm());
  return out;
}

ErrorCoefficients hermitian_draw(const TwoStageScheme& scheme, const MatrixXc& A, const MatrixXc& B,
                                 int max_order) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(ErrorCategory::Dimension, "project_error: A and B differ in dimension");
  // Anti-Hermitian generators X = -iA, Y = -iB keep S(h) unitary for real coefficients.
  const MatrixXc X = cplx(0, -1) * A;
  const MatrixXc Y = cplx(0, -1) * B;
  std::vector<int> powers;
  if (scheme.symmetric)
    powers = {1, 3, 5, 7, 9, 11, 13};
  else
    powers = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  const int npts = static_cast<int>(powers.size()) + 4;
  std::vector<double> hs;
  for (int j = 0; j < npts; ++j) hs.push_back(0.5 * std::pow(0.85, j));

  const Eigen::Index n = A.size();
  Eigen::MatrixXd V(npts, static_cast<Eigen::Index>(powers.size()));
  MatrixXc data(npts, n);
  for (int j = 0; j < npts; ++j) {
    const double h = hs[j];
    const MatrixXc S = apply_two_stage(A, B, scheme, h, Direction::RealTime);
    const MatrixXc E = MatrixXc(S.log()) - h * (X + Y);
    data.row(j) = Eigen::Map<const VectorXc>(E.data(), n).transpose();
    for (std::size_t p = 0; p < powers.size(); ++p) V(j, static_cast<Eigen::Index>(p)) = std::pow(h, powers[p]);
  }
  // Column scaling keeps the Vandermonde solve well conditioned.
  Eigen::VectorXd colscale = V.colwise().norm().cwiseInverse();
  const Eigen::MatrixXd Vs = V * colscale.asDiagonal();
  const MatrixXc fitted = Vs.cast<cplx>().colPivHouseholderQr().solve(data);

  GradedError graded;
  for (auto& g : graded.grade) g = MatrixXc::Zero(A.rows(), A.cols());
  for (std::size_t p = 0; p < powers.size(); ++p) {
    if (powers[p] > 5) continue;
    const VectorXc row = fitted.row(static_cast<Eigen::Index>(p)).transpose() * colscale(static_cast<Eigen::Index>(p));
    graded.grade[powers[p]] = Eigen::Map<const MatrixXc>(row.data(), A.rows(), A.cols());
  }
  ErrorCoefficients out;
  fill_coefficients(out, graded, commutator_basis(X, Y, max_order), max_order, X.norm() + Y.norm());
  return out;
}

void accumulate(ErrorCoefficients& sum, const ErrorCoefficients& x, double w) {
  sum.nu_minus_1 += w * x.nu_minus_1;
  sum.sigma_minus_1 += w * x.sigma_minus_1;
  sum.second_order += w * x.second_order;
  sum.alpha += w * x.alpha;
  sum.beta += w * x.beta;
  for (int j = 0; j < 6; ++j) sum.gamma[j] += w * x.gamma[j];
}

double max_deviation(const ErrorCoefficients& x, const ErrorCoefficients& mean) {
  double d = std::max({std::abs(x.nu_minus_1 - mean.nu_minus_1), std::abs(x.sigma_minus_1 - mean.sigma_minus_1),
                       std::abs(x.second_order - mean.second_order), std::abs(x.alpha - mean.alpha),
                       std::abs(x.beta - mean.beta)});
  for (int j = 0; j < 6; ++j) d = std::max(d, std::abs(x.gamma[j] - mean.gamma[j]));
  return d;
}

}  // namespace

ErrorCoefficients project_error(const TwoStageScheme& scheme, const MatrixXc& A, const MatrixXc& B, int max_order) {
  validate_consistency(scheme);
  if (max_order != 3 && max_order != 5) throw Error(ErrorCategory::Range, "max_order must be 3 or 5");
  return hermitian_draw(scheme, A, B, max_order);
}

ErrorCoefficients estimate_error_coefficients(const TwoStageScheme& scheme, const ErrorEstimateOptions& options) {
  if (!validate_consistency(scheme).consistent)
    throw Error(ErrorCategory::Validation, "scheme '" + scheme.name + "' violates the consistency condition");
  if (options.max_order != 3 && options.max_order != 5)
    throw Error(ErrorCategory::Range, "max_order must be 3 or 5");
  if (options.draws < 1) throw Error(ErrorCategory::Range, "at least one draw is required");

  std::mt19937_64 rng(options.seed);
  std::vector<ErrorCoefficients> draws;
  int attempts = 0;
  while (static_cast<int>(draws.size()) < options.draws) {
    if (++attempts > 4 * options.draws + 8)
      throw Error(ErrorCategory::DegenerateDraw, "too many degenerate random draws");
    try {
      if (options.probe == ProbeKind::Nilpotent) {
        draws.push_back(nilpotent_draw(scheme, options.max_order, std::max(2, options.dim / 2), rng));
      } else {
        const MatrixXc A = random_hermitian(options.dim, rng);
        const MatrixXc B = random_hermitian(options.dim, rng);
        draws.push_back(hermitian_draw(scheme, A, B, options.max_order));
      }
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::DegenerateDraw) throw;
    }
  }
  ErrorCoefficients mean;
  const double w = 1.0 / static_cast<double>(draws.size());
  for (const auto& d : draws) {
    accumulate(mean, d, w);
    mean.residual = std::max(mean.residual, d.residual);
  }
  mean.has_gamma = options.max_order >= 5;
  for (const auto& d : draws) mean.spread = std::max(mean.spread, max_deviation(d, mean));
  return mean;
}

EfficiencyScore efficiency(const TwoStageScheme& scheme, const ErrorCoefficients& c) {
  EfficiencyScore score;
  score.order = scheme.order;
  score.q = scheme.cycles();
  switch (scheme.order) {
    case 1: score.leading_error = std::abs(c.second_order); break;
    case 2: score.leading_error = c.third_order_norm(); break;
    case 4:
      if (!c.has_gamma) throw Error(ErrorCategory::Range, "order-4 efficiency needs fifth-order coefficients");
      score.leading_error = c.fifth_order_norm();
      break;
    default:
      throw Error(ErrorCategory::Range,
                  "efficiency is defined for orders 1, 2 and 4; got " + std::to_string(scheme.order));
  }
  const double qn = std::pow(static_cast<double>(score.q), scheme.order);
  if (score.leading_error < 1e-12) {
    score.order_underclaimed = true;
    score.eff = std::numeric_limits<double>::infinity();
  } else {
    score.eff = 1.0 / (qn * score.leading_error);
  }
  return score;
}

EfficiencyScore efficiency(const TwoStageScheme& scheme, const ErrorEstimateOptions& options) {
  ErrorEstimateOptions o = options;
  o.max_order = scheme.order >= 4 ? 5 : options.max_order;
  return efficiency(scheme, estimate_error_coefficients(scheme, o));
}

double fit_loglog_slope(std::span<const double> h, std::span<const double> error, double floor) {
  if (h.size() != error.size()) throw Error(ErrorCategory::Structural, "h and error lengths differ");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(error[i] >= floor) || !std::isfinite(error[i]) || h[i] <= 0.0) continue;
    x.push_back(std::log(h[i]));
    y.push_back(std::log(error[i]));
  }
  if (x.size() < 3)
    throw Error(ErrorCategory::GridUnusable,
                "only " + std::to_string(x.size()) + " grid points above the round-off plateau");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<double> default_order_grid() { return {0.5, 0.25, 0.125, 0.0625, 0.03125}; }

double empirical_order(const TwoStageScheme& scheme, int dim, std::span<const double> h_grid, std::uint64_t seed) {
  if (h_grid.size() < 4) throw Error(ErrorCategory::GridUnusable, "order fits need at least four step sizes");
  validate_consistency(scheme);
  std::mt19937_64 rng(seed);
  const MatrixXc A = random_hermitian(dim, rng);
  const MatrixXc B = random_hermitian(dim, rng);
  const MatrixXc exact = HermitianSpectrum(A + B).exp(generator(Direction::RealTime));
  std::vector<double> hs, errs;
  for (double h : h_grid) {
    const long steps = std::max(1L, std::lround(1.0 / h));
    const double he = 1.0 / static_cast<double>(steps);
    const MatrixXc U = matrix_power(apply_two_stage(A, B, scheme, he, Direction::RealTime), steps);
    hs.push_back(he);
    errs.push_back(frobenius_distance(U, exact));
  }
  return fit_loglog_slope(hs, errs);
}

}  // namespace trotterkit

#include "trotterkit/multistage.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace trotterkit {

MultiStageScheme MultiStageScheme::reversed() const {
  MultiStageScheme r = *this;
  r.c.assign(d.rbegin(), d.rend());
  r.d.assign(c.rbegin(), c.rend());
  return r;
}

bool MultiStageScheme::is_palindromic(double tolerance) const {
  const MultiStageScheme r = reversed();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(r.c[i] - c[i]) > tolerance || std::abs(r.d[i] - d[i]) > tolerance) return false;
  return true;
}

MultiStageScheme to_multistage(const TwoStageScheme& scheme) {
  if (!validate_consistency(scheme).consistent)
    throw Error(ErrorCategory::Validation, "scheme '" + scheme.name + "' violates the consistency condition");
  const int q = scheme.cycles();
  MultiStageScheme ms;
  ms.name = scheme.name;
  ms.order = scheme.order;
  ms.source_scheme = scheme.name;
  ms.c.resize(q);
  ms.d.resize(q);
  ms.c[0] = scheme.a[0];
  ms.d[0] = scheme.b[0] - ms.c[0];
  for (int i = 1; i < q; ++i) {
    ms.c[i] = scheme.a[i] - ms.d[i - 1];
    ms.d[i] = scheme.b[i] - ms.c[i];
  }
  return ms;
}

TwoStageScheme to_two_stage(const MultiStageScheme& ms) {
  const int q = ms.cycles();
  TwoStageScheme s;
  s.name = ms.source_scheme.empty() ? ms.name : ms.source_scheme;
  s.order = ms.order;
  s.a.resize(q + 1);
  s.b.resize(q);
  s.a[0] = ms.c[0];
  for (int i = 0; i < q; ++i) {
    s.b[i] = ms.c[i] + ms.d[i];
    s.a[i + 1] = ms.d[i] + (i + 1 < q ? ms.c[i + 1] : cplx(0.0));
  }
  s.symmetric = ms.is_palindromic();
  return s;
}

OperatorSplit OperatorSplit::from_parts(std::vector<MatrixXc> parts) {
  if (parts.empty()) throw Error(ErrorCategory::Structural, "operator split needs at least one part");
  OperatorSplit split;
  split.dim = static_cast<int>(parts.front().rows());
  split.total = MatrixXc::Zero(split.dim, split.dim);
  for (const auto& p : parts) {
    if (p.rows() != split.dim || p.cols() != split.dim)
      throw Error(ErrorCategory::Dimension, "operator split parts differ in dimension");
    if (!is_hermitian(p)) throw Error(ErrorCategory::Validation, "operator split part is not Hermitian");
    split.total += p;
  }
  split.parts = std::move(parts);
  return split;
}

ExponentialCache::ExponentialCache(const OperatorSplit& split, ExponentialPath path)
    : split_(split), path_(path), spectra_(split.parts.size()), cache_(split.parts.size()) {
  if (path_ == ExponentialPath::Lifted && !split.has_local_terms())
    throw Error(ErrorCategory::Structural, "lifted exponentials need the split's two-site terms");
  if (path_ == ExponentialPath::Auto)
    path_ = (split.has_local_terms() && split.dim > 512) ? ExponentialPath::Lifted : ExponentialPath::Dense;
}

namespace {

// M <- G_{ab} M for a two-site gate on sites (a, b), acting on every column of M.
void apply_two_site_gate(MatrixXc& M, const Eigen::Matrix4cd& gate, int site_a, int site_b) {
  const Eigen::Index dim = M.rows();
  const Eigen::Index ma = Eigen::Index(1) << site_a;
  const Eigen::Index mb = Eigen::Index(1) << site_b;
  // Local basis index = 2 * bit(site_a) + bit(site_b).
  for (Eigen::Index base = 0; base < dim; ++base) {
    if ((base & ma) || (base & mb)) continue;
    const Eigen::Index idx[4] = {base, base | mb, base | ma, base | ma | mb};
    for (Eigen::Index col = 0; col < M.cols(); ++col) {
      cplx v[4];
      for (int r = 0; r < 4; ++r) v[r] = M(idx[r], col);
      for (int r = 0; r < 4; ++r) M(idx[r], col) = gate(r, 0) * v[0] + gate(r, 1) * v[1] + gate(r, 2) * v[2] + gate(r, 3) * v[3];
    }
  }
}

}  // namespace

MatrixXc ExponentialCache::lifted_exp(int part, cplx s) const {
  MatrixXc U = MatrixXc::Identity(split_.dim, split_.dim);
  for (const auto& term : split_.local_terms[part]) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(term.matrix);
    Eigen::Vector4cd ph;
    for (int j = 0; j < 4; ++j) ph(j) = std::exp(s * eig.eigenvalues()(j));
    const Eigen::Matrix4cd gate = eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
    apply_two_site_gate(U, gate, term.site_a, term.site_b);
  }
  return U;
}

const MatrixXc& ExponentialCache::exp(int part, cplx s) {
  auto& entries = cache_.at(part);
  const auto key = std::make_pair(s.real(), s.imag());
  if (auto it = entries.find(key); it != entries.end()) return it->second;
  MatrixXc value;
  if (path_ == ExponentialPath::Lifted) {
    value = lifted_exp(part, s);
  } else {
    if (!spectra_[part]) spectra_[part].emplace(split_.parts[part]);
    value = spectra_[part]->exp(s);
  }
  return entries.emplace(key, std::move(value)).first->second;
}

MatrixXc apply_two_stage(const MatrixXc& A, const MatrixXc& B, const TwoStageScheme& scheme, double h,
                         Direction direction) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols())
    throw Error(ErrorCategory::Dimension, "apply_two_stage: A and B must be square of equal size");
  validate_consistency(scheme);
  const cplx g = generator(direction) * h;
  const HermitianSpectrum sa(A), sb(B);
  MatrixXc U = sa.exp(g * scheme.a[0]);
  for (int i = 0; i < scheme.cycles(); ++i) {
    U = U * sb.exp(g * scheme.b[i]);
    U = U * sa.exp(g * scheme.a[i + 1]);
  }
  return U;
}

namespace {

// Flattened (part, coefficient) sequence of one step with adjacent equal parts merged.
std::vector<std::pair<int, cplx>> factor_sequence(int stages, const MultiStageScheme& ms) {
  std::vector<std::pair<int, cplx>> seq;
  auto push = [&](int part, cplx coef) {
    if (!seq.empty() && seq.back().first == part)
      seq.back().second += coef;
    else
      seq.emplace_back(part, coef);
  };
  for (int i = 0; i < ms.cycles(); ++i) {
    for (int k = 0; k < stages; ++k) push(k, ms.c[i]);
    for (int k = stages - 1; k >= 0; --k) push(k, ms.d[i]);
  }
  return seq;
}

}  // namespace

MatrixXc apply_multistage(ExponentialCache& cache, const OperatorSplit& split, const MultiStageScheme& ms, double h,
                          Direction direction) {
  if (ms.c.size() != ms.d.size() || ms.c.empty())
    throw Error(ErrorCategory::Structural, "multistage scheme needs equally many c and d coefficients");
  const cplx g = generator(direction) * h;
  MatrixXc U = MatrixXc::Identity(split.dim, split.dim);
  bool first = true;
  for (const auto& [part, coef] : factor_sequence(split.stages(), ms)) {
    if (coef == cplx(0.0)) continue;
    const MatrixXc& F = cache.exp(part, g * coef);
    if (first) {
      U = F;
      first = false;
    } else {
      U = U * F;
    }
  }
  return U;
}

MatrixXc apply_multistage(const OperatorSplit& split, const MultiStageScheme& ms, double h, Direction direction,
                          ExponentialPath path) {
  ExponentialCache cache(split, path);
  return apply_multistage(cache, split, ms, h, direction);
}

MatrixXc evolve(const OperatorSplit& split, const MultiStageScheme& ms, double h, long steps, bool alternate_reversal,
                Direction direction, ExponentialPath path) {
  if (steps < 1) throw Error(ErrorCategory::Range, "evolve needs at least one step");
  ExponentialCache cache(split, path);
  const MatrixXc forward = apply_multistage(cache, split, ms, h, direction);
  if (!alternate_reversal || steps == 1 || ms.is_palindromic()) return matrix_power(forward, steps);
  const MatrixXc backward = apply_multistage(cache, split, ms.reversed(), h, direction);
  // Matrix products read left to right in time order of the written decomposition.
  MatrixXc U = matrix_power(forward * backward, steps / 2);
  if (steps % 2 == 1) U = U * forward;
  return U;
}

double empirical_order(const OperatorSplit& split, const MultiStageScheme& ms, std::span<const double> h_grid,
                       bool alternate_reversal) {
  if (h_grid.size() < 4) throw Error(ErrorCategory::GridUnusable, "order fits need at least four step sizes");
  const MatrixXc exact = HermitianSpectrum(split.total).exp(generator(Direction::RealTime));
  std::vector<double> hs, errs;
  for (double h : h_grid) {
    long steps = std::max(1L, std::lround(1.0 / h));
    if (alternate_reversal && steps % 2 == 1) ++steps;
    const double he = 1.0 / static_cast<double>(steps);
    const MatrixXc U = evolve(split, ms, he, steps, alternate_reversal);
    hs.push_back(he);
    errs.push_back(frobenius_distance(U, exact));
  }
  return fit_loglog_slope(hs, errs);
}

OperatorSplit random_split(int stages, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MatrixXc> parts;
  for (int k = 0; k < stages; ++k) parts.push_back(random_hermitian(dim, rng));
  return OperatorSplit::from_parts(std::move(parts));
}

}  // namespace trotterkit

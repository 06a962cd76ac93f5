#include "trotterkit/linalg.hpp"

#include <cmath>
#include <cstdio>

namespace trotterkit {

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Structural: return "structural";
    case ErrorCategory::Dimension: return "dimension";
    case ErrorCategory::NotFound: return "not-found";
    case ErrorCategory::DegenerateDraw: return "degenerate-draw";
    case ErrorCategory::GridUnusable: return "grid-unusable";
    case ErrorCategory::Range: return "range";
    case ErrorCategory::Capacity: return "capacity";
    case ErrorCategory::Convergence: return "convergence";
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Usage: return "usage";
  }
  return "unknown";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

HermitianSpectrum::HermitianSpectrum(const MatrixXc& H) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(H);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCategory::Convergence, "Hermitian eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  // One Newton-Schulz step pulls the eigenvectors back to orthonormal at rounding level, so
  // repeated products of exp(s H) do not accumulate the solver's orthogonality defect.
  const Eigen::Index n = eigenvectors_.cols();
  const MatrixXc defect = MatrixXc::Identity(n, n) - eigenvectors_.adjoint() * eigenvectors_;
  eigenvectors_ += 0.5 * eigenvectors_ * defect;
}

MatrixXc HermitianSpectrum::exp(cplx s) const {
  VectorXc phases(eigenvalues_.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) phases(j) = std::exp(s * eigenvalues_(j));
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

double HermitianSpectrum::spectral_radius() const {
  if (eigenvalues_.size() == 0) return 0.0;
  return std::max(std::abs(eigenvalues_.minCoeff()), std::abs(eigenvalues_.maxCoeff()));
}

bool is_hermitian(const MatrixXc& H, double tolerance) {
  if (H.rows() != H.cols()) return false;
  return (H - H.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

MatrixXc random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXc H(dim, dim);
  for (int i = 0; i < dim; ++i) {
    H(i, i) = normal(rng);
    for (int j = i + 1; j < dim; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      H(i, j) = cplx(re, im);
      H(j, i) = cplx(re, -im);
    }
  }
  const double norm = HermitianSpectrum(H).spectral_radius();
  return H / norm;
}

MatrixXc matrix_power(const MatrixXc& M, long n) {
  MatrixXc result = MatrixXc::Identity(M.rows(), M.cols());
  MatrixXc base = M;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = result * base;
      }
    }
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

double frobenius_distance(const MatrixXc& A, const MatrixXc& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(ErrorCategory::Dimension, "frobenius_distance: dimension mismatch");
  return (A - B).norm();
}

double gershgorin_bound(const MatrixXc& H) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < H.rows(); ++i) bound = std::max(bound, H.row(i).cwiseAbs().sum());
  return bound;
}

}  // namespace trotterkit

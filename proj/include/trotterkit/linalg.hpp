#pragma once

#include "trotterkit/core.hpp"

#include <random>

namespace trotterkit {

/// Hermitian eigendecomposition H = V diag(lambda) V^dagger, reusable for exp(s H) at many s.
class HermitianSpectrum {
 public:
  HermitianSpectrum() = default;
  explicit HermitianSpectrum(const MatrixXc& H);

  /// exp(s * H) for any complex s (non-unitary for complex s).
  MatrixXc exp(cplx s) const;

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const MatrixXc& eigenvectors() const { return eigenvectors_; }
  Eigen::Index dim() const { return eigenvalues_.size(); }
  double spectral_radius() const;

 private:
  Eigen::VectorXd eigenvalues_;
  MatrixXc eigenvectors_;
};

bool is_hermitian(const MatrixXc& H, double tolerance = tol::hermitian);

/// Random Hermitian matrix with Gaussian entries, rescaled to spectral norm 1.
MatrixXc random_hermitian(int dim, std::mt19937_64& rng);

/// M^n by binary powering; n >= 0.
MatrixXc matrix_power(const MatrixXc& M, long n);

/// Entry-wise 2-norm of A - B.
double frobenius_distance(const MatrixXc& A, const MatrixXc& B);

/// Upper bound on the spectral radius from Gershgorin discs.
double gershgorin_bound(const MatrixXc& H);

}  // namespace trotterkit

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trotterkit {

using cplx = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = MatrixX<cplx>;
using VectorXc = VectorX<cplx>;

/// Sign of the generator in exp(g * H * t): real time uses g = -i, imaginary time g = -1.
enum class Direction { RealTime, ImaginaryTime };

inline cplx generator(Direction d) {
  return d == Direction::RealTime ? cplx(0.0, -1.0) : cplx(-1.0, 0.0);
}

enum class ErrorCategory {
  Structural,      // malformed input (lengths, shapes)
  Dimension,       // operand dimensions disagree
  NotFound,        // unknown catalog entry / method
  DegenerateDraw,  // random probe operators did not span the commutator basis
  GridUnusable,    // too few points left for an order fit
  Range,           // argument outside the supported domain
  Capacity,        // problem too large for dense storage
  Convergence,     // iterative solver did not converge
  Validation,      // scheme or catalog entry failed a check
  Io,
  Usage,
};

std::string_view category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Numerical tolerances shared across modules.
namespace tol {
inline constexpr double consistency = 1e-12;
inline constexpr double symmetry = 1e-14;
inline constexpr double order4_residual = 1e-8;
inline constexpr double hermitian = 1e-13;
inline constexpr double error_floor = 1e-12;       // round-off plateau for order fits
inline constexpr double degenerate_residual = 0.1;  // projection residual / |E|
}  // namespace tol

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

}  // namespace trotterkit

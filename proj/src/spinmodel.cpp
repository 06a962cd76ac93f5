#include "trotterkit/spinmodel.hpp"

namespace trotterkit {

std::string_view boundary_name(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "open") return Boundary::Open;
  if (text == "periodic") return Boundary::Periodic;
  throw Error(ErrorCategory::Usage, "boundary must be 'open' or 'periodic'");
}

void XxzConfig::validate() const {
  if (L < 2) throw Error(ErrorCategory::Range, "XXZ chain needs L >= 2");
  if (boundary == Boundary::Periodic && L < 3) throw Error(ErrorCategory::Range, "periodic XXZ chain needs L >= 3");
  if (L > 12) throw Error(ErrorCategory::Capacity, "XXZ chain with L = " + std::to_string(L) +
                                                       " exceeds dense storage (dim > 4096)");
}

std::array<std::vector<Bond>, 3> bond_groups(const XxzConfig& cfg) {
  cfg.validate();
  const int n_bonds = cfg.boundary == Boundary::Open ? cfg.L - 1 : cfg.L;
  std::array<std::vector<Bond>, 3> groups;
  for (int b = 0; b < n_bonds; ++b) {
    int color = b % 3;
    // On a ring with L = 1 mod 3 the closing bond would share a site and a colour with bond 0.
    if (cfg.boundary == Boundary::Periodic && b == n_bonds - 1 && n_bonds % 3 == 1) color = 1;
    groups[color].push_back({b, (b + 1) % cfg.L});
  }
  return groups;
}

Eigen::Matrix4cd xxz_bond(double delta, double J) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(3, 3) = J * delta;
  m(1, 1) = m(2, 2) = -J * delta;
  m(1, 2) = m(2, 1) = 2.0 * J;  // sx sx + sy sy flips an antiparallel pair
  return m;
}

MatrixXc lift_two_site(const Eigen::Matrix4cd& term, int site_a, int site_b, int L) {
  const Eigen::Index dim = Eigen::Index(1) << L;
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int ba = (col >> site_a) & 1, bb = (col >> site_b) & 1;
    const int local_col = 2 * ba + bb;
    const Eigen::Index rest = col & ~((Eigen::Index(1) << site_a) | (Eigen::Index(1) << site_b));
    for (int local_row = 0; local_row < 4; ++local_row) {
      const cplx v = term(local_row, local_col);
      if (v == cplx(0.0)) continue;
      const Eigen::Index row =
          rest | (Eigen::Index(local_row >> 1) << site_a) | (Eigen::Index(local_row & 1) << site_b);
      out(row, col) += v;
    }
  }
  return out;
}

OperatorSplit build_xxz(const XxzConfig& cfg) {
  const auto groups = bond_groups(cfg);
  const Eigen::Matrix4cd bond = xxz_bond(cfg.delta, cfg.J);
  std::vector<MatrixXc> parts;
  std::vector<std::vector<LocalTerm>> terms(3);
  for (int g = 0; g < 3; ++g) {
    MatrixXc part = MatrixXc::Zero(cfg.dim(), cfg.dim());
    for (const auto& b : groups[g]) {
      part += lift_two_site(bond, b.site_a, b.site_b, cfg.L);
      terms[g].push_back({b.site_a, b.site_b, bond});
    }
    parts.push_back(std::move(part));
  }
  OperatorSplit split = OperatorSplit::from_parts(std::move(parts));
  split.local_terms = std::move(terms);
  split.sites = cfg.L;
  return split;
}

MatrixXc exact_evolution(const MatrixXc& H, double t, Direction direction) {
  if (H.rows() != H.cols()) throw Error(ErrorCategory::Dimension, "Hamiltonian must be square");
  if (!is_hermitian(H)) throw Error(ErrorCategory::Validation, "Hamiltonian is not Hermitian");
  return HermitianSpectrum(H).exp(generator(direction) * t);
}

EvolutionError frobenius_error(const MatrixXc& U_approx, const MatrixXc& U_exact, double t, std::string method) {
  if (U_approx.rows() != U_exact.rows() || U_approx.cols() != U_exact.cols())
    throw Error(ErrorCategory::Dimension, "frobenius_error: operator dimensions differ");
  return {frobenius_distance(U_approx, U_exact), t, std::move(method)};
}

}  // namespace trotterkit

#pragma once

#include "trotterkit/multistage.hpp"

#include <array>
#include <string>
#include <vector>

namespace trotterkit {

enum class Boundary { Open, Periodic };

std::string_view boundary_name(Boundary b);
Boundary parse_boundary(std::string_view text);

/// H = J sum_bonds (sx sx + sy sy + delta sz sz) with Pauli matrices.
struct XxzConfig {
  int L = 8;
  double delta = 1.0;
  Boundary boundary = Boundary::Open;
  double J = 1.0;

  int dim() const { return 1 << L; }
  void validate() const;
};

inline constexpr int max_dense_dim = 4096;

struct Bond {
  int site_a = 0;
  int site_b = 1;
};

/// Nearest-neighbour bonds split into three groups with no shared site inside a group.
/// Bonds are listed by ascending first site within each group.
std::array<std::vector<Bond>, 3> bond_groups(const XxzConfig& cfg);

/// 4x4 bond matrix in the local basis 2 * bit(site_a) + bit(site_b), bit 0 = spin up.
Eigen::Matrix4cd xxz_bond(double delta, double J = 1.0);

/// Dense 2^L operator of a two-site term.
MatrixXc lift_two_site(const Eigen::Matrix4cd& term, int site_a, int site_b, int L);

/// Three-part split of the XXZ chain, one part per bond group, with its two-site terms.
/// Throws Error(Capacity) above 4096 basis states.
OperatorSplit build_xxz(const XxzConfig& cfg);

/// exp(g H t) from a full Hermitian eigendecomposition, g = generator(direction).
MatrixXc exact_evolution(const MatrixXc& H, double t, Direction direction = Direction::RealTime);

struct EvolutionError {
  double value = 0.0;
  double t = 0.0;
  std::string method;
};

EvolutionError frobenius_error(const MatrixXc& U_approx, const MatrixXc& U_exact, double t = 0.0,
                               std::string method = {});

}  // namespace trotterkit

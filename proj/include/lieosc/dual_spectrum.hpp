#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lieosc/group_domain.hpp"
#include "lieosc/group_id.hpp"

namespace lieosc {

using Matrix = Eigen::MatrixXcd;

/// Torus frequency l in Z^n.
struct TorusFreq {
  std::vector<int> ell;
  auto operator<=>(const TorusFreq&) const = default;
};

/// SU(2) spin l = two_l / 2.
struct Su2Spin {
  int two_l = 0;
  auto operator<=>(const Su2Spin&) const = default;
};

/// A point of the unitary dual. Ordering is the canonical enumeration order.
using DualIndex = std::variant<TorusFreq, Su2Spin>;

std::string to_string(const DualIndex& index);

/// Index of the trivial representation.
DualIndex trivial_index(const GroupId& group);

struct SpectralData {
  int dim = 1;            // d_xi
  double eigenvalue = 0;  // lambda_xi of the positive Laplacian
  double weight = 1;      // <xi> = sqrt(1 + lambda_xi)
};

/// Throws InvalidArgument when the index variant or length does not match the group.
void check_index(const GroupId& group, const DualIndex& index);

SpectralData spectral_data(const GroupId& group, const DualIndex& index);

/// All indices with <xi> <= bandwidth, lexicographic for the torus and by
/// increasing spin for SU(2). Requires bandwidth >= 1.
std::vector<DualIndex> enumerate_dual(const GroupId& group, double bandwidth);

/// Largest |l_k| (torus) or 2l (SU(2)) reachable with <xi> <= bandwidth.
int max_level_for_bandwidth(const GroupId& group, double bandwidth);

/// Unitary matrix xi(x). SU(2) rows and columns are ordered m = l, l-1, ..., -l,
/// so the spin-1/2 representation is the defining 2x2 matrix.
Matrix representation_matrix(const GroupId& group, const DualIndex& index, const GroupPoint& x);

/// Tr xi(x), by closed form (exponential / Chebyshev U_{2l}(cos(|x|/2))).
std::complex<double> character(const GroupId& group, const DualIndex& index, const GroupPoint& x);

/// Wigner small-d matrix d^l(beta) with the same m ordering as representation_matrix,
/// computed from the three-term Jacobi recurrence in cos(beta).
Eigen::MatrixXd wigner_small_d(int two_l, double beta);

/// Jacobi polynomial P_n^{(a,b)}(x) by forward recurrence.
double jacobi_polynomial(int n, int a, int b, double x);

}  // namespace lieosc

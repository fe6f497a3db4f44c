#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lieosc/group_id.hpp"

namespace lieosc {

struct TorusPoint {
  std::vector<double> coords;  // each in [0, 1)
};

/// Unit quaternion a + b i + c j + d k, identified with the SU(2) matrix
/// [[a + i b, c + i d], [-c + i d, a - i b]].
struct Su2Point {
  std::array<double, 4> q{1.0, 0.0, 0.0, 0.0};
};

/// ZYZ Euler data of an SU(2) element U = Rz(alpha) Ry(beta) Rz(gamma), kept in
/// the form that is single-valued on SU(2):
///   U11 = cos(beta/2) exp(-i half_sum),   half_sum  = (alpha + gamma) / 2
///   U21 = sin(beta/2) exp( i half_diff),  half_diff = (alpha - gamma) / 2
struct Su2Euler {
  double half_sum = 0.0;
  double half_diff = 0.0;
  double beta = 0.0;
};

class GroupPoint {
 public:
  /// The identity of T^1.
  GroupPoint() : data_(TorusPoint{{0.0}}) {}

  /// Coordinates are reduced mod 1.
  static GroupPoint torus(std::vector<double> coords);
  /// The quaternion is renormalized; a zero quaternion is rejected.
  static GroupPoint su2(double a, double b, double c, double d);
  static GroupPoint su2_from_euler(double alpha, double beta, double gamma);
  /// exp of the Lie-algebra vector v: rotation by |v| about v/|v|, so that
  /// geodesic_norm(su2_exp(v)) = |v| for |v| <= 2 pi.
  static GroupPoint su2_exp(const std::array<double, 3>& v);

  GroupId group() const;
  bool is_torus() const { return std::holds_alternative<TorusPoint>(data_); }
  bool is_su2() const { return std::holds_alternative<Su2Point>(data_); }

  const TorusPoint& as_torus() const;
  const Su2Point& as_su2() const;

  /// 2x2 SU(2) matrix in row-major order.
  std::array<std::complex<double>, 4> su2_matrix() const;
  Su2Euler su2_euler() const;

 private:
  explicit GroupPoint(TorusPoint p) : data_(std::move(p)) {}
  explicit GroupPoint(Su2Point p) : data_(p) {}

  std::variant<TorusPoint, Su2Point> data_;
};

GroupPoint identity(const GroupId& group);
GroupPoint compose(const GroupPoint& x, const GroupPoint& y);
GroupPoint invert(const GroupPoint& x);

/// |x| = d(x, e). Torus: wrapped Euclidean norm. SU(2): 2 arccos(Re tr X / 2),
/// evaluated as 2 atan2(|vector part|, scalar part) so it stays accurate near e.
double geodesic_norm(const GroupPoint& x);

/// d(x, y) = |y^{-1} x|.
double distance(const GroupPoint& x, const GroupPoint& y);

/// Normalized Haar volume of the geodesic ball B(e, r).
double ball_volume(const GroupId& group, double r);

/// Inverse of ball_volume on [0, 1]: the radius whose ball has the given volume.
double ball_radius_for_volume(const GroupId& group, double volume);

/// Euler product structure of an SU(2) grid: point index (ia * B + ib) * 2B + ig.
struct EulerLayout {
  std::vector<double> alpha;         // 2B uniform nodes on [0, 2 pi)
  std::vector<double> beta;          // B nodes with cos(beta) at Gauss-Legendre abscissae
  std::vector<double> beta_weights;  // Gauss-Legendre weights, summing to 2
  std::vector<double> gamma;         // 2B uniform nodes on [0, 4 pi)
};

class QuadratureGrid {
 public:
  QuadratureGrid(GroupId group, int resolution, std::vector<GroupPoint> points,
                 std::vector<double> weights, std::unique_ptr<EulerLayout> euler);

  const GroupId& group() const { return group_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<GroupPoint>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const GroupPoint& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Present for SU(2) grids only.
  const EulerLayout* euler() const { return euler_.get(); }

  /// Largest spin 2l (SU(2)) or largest |l_k| (torus) for which the grid
  /// integrates all pairwise products of matrix coefficients exactly.
  int band_limit() const;

  /// True when every representation with weight <= bandwidth lies within band_limit().
  bool supports_bandwidth(double bandwidth) const;

  /// Characteristic point spacing used for ball-resolution checks.
  double spacing() const;

  /// d(x_i, e) for every grid point, cached at construction.
  const std::vector<double>& norms() const { return norms_; }

  /// Debug dump: one row per point, coordinates then weight.
  std::string to_csv() const;

 private:
  GroupId group_;
  int resolution_;
  std::vector<GroupPoint> points_;
  std::vector<double> weights_;
  std::unique_ptr<EulerLayout> euler_;
  std::vector<double> norms_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

/// Torus: (2B)^n uniform tensor grid. SU(2): 2B x B x 2B ZYZ Euler product grid,
/// Gauss-Legendre in cos(beta). Weights sum to 1 (normalized Haar measure).
GridPtr build_grid(const GroupId& group, int resolution);

/// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace lieosc

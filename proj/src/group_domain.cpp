#include "lieosc/group_domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/roots.hpp>

#include "lieosc/dual_spectrum.hpp"
#include "lieosc/errors.hpp"

namespace lieosc {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

void require_same_group(const GroupPoint& x, const GroupPoint& y) {
  if (x.is_torus() != y.is_torus() ||
      (x.is_torus() && x.as_torus().coords.size() != y.as_torus().coords.size()))
    throw InvalidArgument("group elements belong to different groups");
}

// Area of the disk of radius rho inside the unit square centred at the origin.
double square_disk_area(double rho) {
  if (rho <= 0.0) return 0.0;
  if (rho <= 0.5) return kPi * rho * rho;
  if (rho >= std::numbers::sqrt2 / 2.0) return 1.0;
  double cap = rho * rho * std::acos(0.5 / rho) - 0.5 * std::sqrt(rho * rho - 0.25);
  return kPi * rho * rho - 4.0 * cap;
}

double torus3_ball_volume(double r) {
  // Slices x = const of the cube [-1/2, 1/2]^3 meet the ball in a square-disk region.
  auto slice = [r](double x) { return square_disk_area(std::sqrt(std::max(r * r - x * x, 0.0))); };
  double top = std::min(r, 0.5);
  std::vector<double> cuts{0.0};
  for (double rho : {std::numbers::sqrt2 / 2.0, 0.5}) {
    double x = r * r - rho * rho;
    if (x > 0.0 && std::sqrt(x) < top) cuts.push_back(std::sqrt(x));
  }
  cuts.push_back(top);
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += integrator.integrate(slice, cuts[i], cuts[i + 1]);
  return std::min(2.0 * total, 1.0);
}

double pairwise_sum_range(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum_range(v, h) + pairwise_sum_range(v + h, n - h);
}

}  // namespace

GroupPoint GroupPoint::torus(std::vector<double> coords) {
  if (coords.empty() || coords.size() > 3) throw InvalidArgument("torus point needs 1 to 3 coordinates");
  for (double& c : coords) {
    if (!std::isfinite(c)) throw InvalidArgument("torus coordinate is not finite");
    c = wrap_unit(c);
  }
  return GroupPoint(TorusPoint{std::move(coords)});
}

GroupPoint GroupPoint::su2(double a, double b, double c, double d) {
  double n = std::sqrt(a * a + b * b + c * c + d * d);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("SU(2) quaternion must be finite and nonzero");
  return GroupPoint(Su2Point{{a / n, b / n, c / n, d / n}});
}

GroupPoint GroupPoint::su2_from_euler(double alpha, double beta, double gamma) {
  double p = 0.5 * (alpha + gamma);
  double q = 0.5 * (alpha - gamma);
  double cb = std::cos(0.5 * beta), sb = std::sin(0.5 * beta);
  return su2(cb * std::cos(p), -cb * std::sin(p), -sb * std::cos(q), sb * std::sin(q));
}

GroupPoint GroupPoint::su2_exp(const std::array<double, 3>& v) {
  double t = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (t == 0.0) return GroupPoint(Su2Point{});
  double s = std::sin(0.5 * t) / t;
  return su2(std::cos(0.5 * t), s * v[0], s * v[1], s * v[2]);
}

GroupId GroupPoint::group() const {
  if (is_su2()) return GroupId::su2();
  return GroupId::torus(static_cast<int>(as_torus().coords.size()));
}

const TorusPoint& GroupPoint::as_torus() const {
  if (!is_torus()) throw InvalidArgument("expected a torus point");
  return std::get<TorusPoint>(data_);
}

const Su2Point& GroupPoint::as_su2() const {
  if (!is_su2()) throw InvalidArgument("expected an SU(2) point");
  return std::get<Su2Point>(data_);
}

std::array<std::complex<double>, 4> GroupPoint::su2_matrix() const {
  const auto& q = as_su2().q;
  return {std::complex<double>(q[0], q[1]), std::complex<double>(q[2], q[3]),
          std::complex<double>(-q[2], q[3]), std::complex<double>(q[0], -q[1])};
}

Su2Euler GroupPoint::su2_euler() const {
  const auto& q = as_su2().q;
  double r11 = std::hypot(q[0], q[1]);
  double r21 = std::hypot(q[2], q[3]);
  Su2Euler e;
  e.beta = 2.0 * std::atan2(r21, r11);
  e.half_sum = r11 > 0.0 ? -std::atan2(q[1], q[0]) : 0.0;
  e.half_diff = r21 > 0.0 ? std::atan2(q[3], -q[2]) : 0.0;
  return e;
}

GroupPoint identity(const GroupId& group) {
  if (group.is_su2()) return GroupPoint::su2(1, 0, 0, 0);
  return GroupPoint::torus(std::vector<double>(group.dimension(), 0.0));
}

GroupPoint compose(const GroupPoint& x, const GroupPoint& y) {
  require_same_group(x, y);
  if (x.is_torus()) {
    auto c = x.as_torus().coords;
    const auto& d = y.as_torus().coords;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += d[k];
    return GroupPoint::torus(std::move(c));
  }
  const auto& p = x.as_su2().q;
  const auto& q = y.as_su2().q;
  return GroupPoint::su2(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
                         p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
                         p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
                         p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]);
}

GroupPoint invert(const GroupPoint& x) {
  if (x.is_torus()) {
    auto c = x.as_torus().coords;
    for (double& v : c) v = -v;
    return GroupPoint::torus(std::move(c));
  }
  const auto& q = x.as_su2().q;
  return GroupPoint::su2(q[0], -q[1], -q[2], -q[3]);
}

double geodesic_norm(const GroupPoint& x) {
  if (x.is_torus()) {
    double s = 0.0;
    for (double c : x.as_torus().coords) {
      double m = std::min(c, 1.0 - c);
      s += m * m;
    }
    return std::sqrt(s);
  }
  const auto& q = x.as_su2().q;
  double v = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  return 2.0 * std::atan2(v, q[0]);
}

double distance(const GroupPoint& x, const GroupPoint& y) { return geodesic_norm(compose(invert(y), x)); }

double ball_volume(const GroupId& group, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  if (group.is_su2()) return r >= 2.0 * kPi ? 1.0 : (r - std::sin(r)) / (2.0 * kPi);
  if (r >= group.diameter()) return 1.0;
  switch (group.dimension()) {
    case 1:
      return std::min(2.0 * r, 1.0);
    case 2:
      return square_disk_area(r);
    default:
      return torus3_ball_volume(r);
  }
}

double ball_radius_for_volume(const GroupId& group, double volume) {
  if (!(volume >= 0.0) || volume > 1.0) throw InvalidArgument("volume must lie in [0, 1]");
  if (volume == 0.0) return 0.0;
  if (volume == 1.0) return group.diameter();
  auto f = [&](double r) { return r <= 0.0 ? -volume : ball_volume(group, r) - volume; };
  boost::math::tools::eps_tolerance<double> tol(50);
  auto [lo, hi] = boost::math::tools::bisect(f, 0.0, group.diameter(), tol);
  return 0.5 * (lo + hi);
}

QuadratureGrid::QuadratureGrid(GroupId group, int resolution, std::vector<GroupPoint> points,
                               std::vector<double> weights, std::unique_ptr<EulerLayout> euler)
    : group_(group),
      resolution_(resolution),
      points_(std::move(points)),
      weights_(std::move(weights)),
      euler_(std::move(euler)) {
  if (points_.size() != weights_.size() || points_.empty())
    throw InvalidArgument("grid needs one positive weight per point");
  norms_.reserve(points_.size());
  for (const auto& p : points_) norms_.push_back(geodesic_norm(p));
}

int QuadratureGrid::band_limit() const { return resolution_ - 1; }

bool QuadratureGrid::supports_bandwidth(double bandwidth) const {
  if (bandwidth < 1.0) return true;
  return max_level_for_bandwidth(group_, bandwidth) <= band_limit();
}

double QuadratureGrid::spacing() const {
  if (group_.is_su2()) return 2.0 * kPi / resolution_;
  return 1.0 / (2.0 * resolution_);
}

std::string QuadratureGrid::to_csv() const {
  std::ostringstream out;
  char buf[64];
  if (group_.is_su2()) {
    out << "a,b,c,d,weight\n";
  } else {
    for (int k = 0; k < group_.dimension(); ++k) out << "x" << k << ",";
    out << "weight\n";
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (group_.is_su2()) {
      for (double v : points_[i].as_su2().q) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        out << buf;
      }
    } else {
      for (double v : points_[i].as_torus().coords) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        out << buf;
      }
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", weights_[i]);
    out << buf;
  }
  return out.str();
}

GridPtr build_grid(const GroupId& group, int resolution) {
  if (resolution < 2) throw InvalidArgument("grid resolution B must be at least 2");
  const int m = 2 * resolution;
  std::vector<GroupPoint> points;
  std::vector<double> weights;

  if (group.is_torus()) {
    const int n = group.dimension();
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(m);
    if (total > (std::size_t{1} << 26)) throw InvalidArgument("torus grid too large");
    points.reserve(total);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t r = i;
      for (int k = n - 1; k >= 0; --k) {
        c[k] = static_cast<double>(r % m) / m;
        r /= m;
      }
      points.push_back(GroupPoint::torus(c));
    }
    weights.assign(total, 1.0 / static_cast<double>(total));
    return std::make_shared<const QuadratureGrid>(group, resolution, std::move(points), std::move(weights),
                                                  nullptr);
  }

  if (resolution > 256) throw InvalidArgument("SU(2) grid resolution above 256 is not supported");
  auto layout = std::make_unique<EulerLayout>();
  // Gauss-Legendre abscissae x = cos(beta), ordered by increasing beta.
  auto zeros = boost::math::legendre_p_zeros<double>(resolution);
  std::vector<double> xs;
  for (double z : zeros) {
    xs.push_back(z);
    if (z != 0.0) xs.push_back(-z);
  }
  std::sort(xs.begin(), xs.end(), std::greater<>());
  for (double x : xs) {
    double dp = boost::math::legendre_p_prime(resolution, x);
    layout->beta.push_back(std::acos(x));
    layout->beta_weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  for (int i = 0; i < m; ++i) {
    layout->alpha.push_back(2.0 * kPi * i / m);
    layout->gamma.push_back(4.0 * kPi * i / m);
  }
  const double scale = 1.0 / (2.0 * m * m);
  points.reserve(static_cast<std::size_t>(m) * resolution * m);
  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < resolution; ++ib)
      for (int ig = 0; ig < m; ++ig) {
        points.push_back(GroupPoint::su2_from_euler(layout->alpha[ia], layout->beta[ib], layout->gamma[ig]));
        weights.push_back(layout->beta_weights[ib] * scale);
      }
  return std::make_shared<const QuadratureGrid>(group, resolution, std::move(points), std::move(weights),
                                                std::move(layout));
}

double pairwise_sum(std::span<const double> values) { return pairwise_sum_range(values.data(), values.size()); }

}  // namespace lieosc

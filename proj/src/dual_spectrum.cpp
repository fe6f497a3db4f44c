#include "lieosc/dual_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "lieosc/errors.hpp"

namespace lieosc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double torus_eigenvalue(const std::vector<int>& ell) {
  double s = 0.0;
  for (int l : ell) s += static_cast<double>(l) * l;
  return kTwoPi * kTwoPi * s;
}

double su2_eigenvalue(int two_l) {
  double l = 0.5 * two_l;
  return l * (l + 1.0);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string to_string(const DualIndex& index) {
  if (const auto* s = std::get_if<Su2Spin>(&index)) {
    if (s->two_l % 2 == 0) return "l=" + std::to_string(s->two_l / 2);
    return "l=" + std::to_string(s->two_l) + "/2";
  }
  std::string out = "(";
  const auto& ell = std::get<TorusFreq>(index).ell;
  for (std::size_t k = 0; k < ell.size(); ++k) out += (k ? "," : "") + std::to_string(ell[k]);
  return out + ")";
}

DualIndex trivial_index(const GroupId& group) {
  if (group.is_su2()) return Su2Spin{0};
  return TorusFreq{std::vector<int>(group.dimension(), 0)};
}

void check_index(const GroupId& group, const DualIndex& index) {
  if (group.is_su2()) {
    const auto* s = std::get_if<Su2Spin>(&index);
    if (!s) throw InvalidArgument("SU(2) expects a spin index, got " + to_string(index));
    if (s->two_l < 0) throw InvalidArgument("spin must be nonnegative");
    return;
  }
  const auto* t = std::get_if<TorusFreq>(&index);
  if (!t) throw InvalidArgument(group.name() + " expects a frequency vector, got " + to_string(index));
  if (static_cast<int>(t->ell.size()) != group.dimension())
    throw InvalidArgument("frequency " + to_string(index) + " has the wrong length for " + group.name());
}

SpectralData spectral_data(const GroupId& group, const DualIndex& index) {
  check_index(group, index);
  SpectralData d;
  if (group.is_su2()) {
    int two_l = std::get<Su2Spin>(index).two_l;
    d.dim = two_l + 1;
    d.eigenvalue = su2_eigenvalue(two_l);
  } else {
    d.eigenvalue = torus_eigenvalue(std::get<TorusFreq>(index).ell);
  }
  d.weight = std::sqrt(1.0 + d.eigenvalue);
  return d;
}

int max_level_for_bandwidth(const GroupId& group, double bandwidth) {
  if (!(bandwidth >= 1.0)) throw InvalidArgument("bandwidth must be at least 1");
  int m = 0;
  if (group.is_su2()) {
    while (std::sqrt(1.0 + su2_eigenvalue(m + 1)) <= bandwidth) ++m;
  } else {
    while (std::sqrt(1.0 + torus_eigenvalue({m + 1})) <= bandwidth) ++m;
  }
  return m;
}

std::vector<DualIndex> enumerate_dual(const GroupId& group, double bandwidth) {
  int m = max_level_for_bandwidth(group, bandwidth);
  std::vector<DualIndex> out;
  if (group.is_su2()) {
    for (int t = 0; t <= m; ++t) out.emplace_back(Su2Spin{t});
    return out;
  }
  const int n = group.dimension();
  std::vector<int> ell(n, -m);
  while (true) {
    if (std::sqrt(1.0 + torus_eigenvalue(ell)) <= bandwidth) out.emplace_back(TorusFreq{ell});
    int k = n - 1;
    while (k >= 0 && ell[k] == m) ell[k--] = -m;
    if (k < 0) break;
    ++ell[k];
  }
  return out;
}

double jacobi_polynomial(int n, int a, int b, double x) {
  if (n < 0) throw InvalidArgument("Jacobi degree must be nonnegative");
  double p0 = 1.0;
  if (n == 0) return p0;
  double p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int k = 2; k <= n; ++k) {
    double c = 2.0 * k + a + b;
    double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    double a2 = (c - 1.0) * (c * (c - 2.0) * x + static_cast<double>(a) * a - static_cast<double>(b) * b);
    double a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    double p2 = (a2 * p1 - a3 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

Eigen::MatrixXd wigner_small_d(int two_l, double beta) {
  if (two_l < 0) throw InvalidArgument("spin must be nonnegative");
  const int d = two_l + 1;
  const double x = std::cos(beta);
  const double sh = std::sin(0.5 * beta), ch = std::cos(0.5 * beta);
  Eigen::MatrixXd out(d, d);
  for (int r = 0; r < d; ++r) {
    const int two_mp = two_l - 2 * r;  // row index m'
    for (int c = 0; c < d; ++c) {
      const int two_m = two_l - 2 * c;  // column index m
      const int jpm = (two_l + two_m) / 2, jmm = (two_l - two_m) / 2;
      const int jpmp = (two_l + two_mp) / 2, jmmp = (two_l - two_mp) / 2;
      const int k = std::min({jpm, jmm, jpmp, jmmp});
      int a, lam;
      if (k == jpm) {
        a = (two_mp - two_m) / 2;
        lam = a;
      } else if (k == jmm || k == jpmp) {
        a = (two_m - two_mp) / 2;
        lam = 0;
      } else {
        a = (two_mp - two_m) / 2;
        lam = a;
      }
      const int b = two_l - 2 * k - a;
      double norm = std::exp(0.5 * (log_binomial(two_l - k, k + a) - log_binomial(k + b, b)));
      double v = norm * std::pow(sh, a) * std::pow(ch, b) * jacobi_polynomial(k, a, b, x);
      out(r, c) = (lam % 2 == 0) ? v : -v;
    }
  }
  return out;
}

Matrix representation_matrix(const GroupId& group, const DualIndex& index, const GroupPoint& x) {
  check_index(group, index);
  if (x.group() != group) throw InvalidArgument("point does not belong to " + group.name());
  if (group.is_torus()) {
    const auto& ell = std::get<TorusFreq>(index).ell;
    const auto& c = x.as_torus().coords;
    double phase = 0.0;
    for (std::size_t k = 0; k < ell.size(); ++k) phase += ell[k] * c[k];
    Matrix m(1, 1);
    m(0, 0) = std::polar(1.0, kTwoPi * phase);
    return m;
  }
  const int two_l = std::get<Su2Spin>(index).two_l;
  const Su2Euler e = x.su2_euler();
  const Eigen::MatrixXd small = wigner_small_d(two_l, e.beta);
  const int d = two_l + 1;
  Matrix m(d, d);
  for (int r = 0; r < d; ++r) {
    const double ma = 0.5 * (two_l - 2 * r);
    for (int c = 0; c < d; ++c) {
      const double mb = 0.5 * (two_l - 2 * c);
      m(r, c) = small(r, c) * std::polar(1.0, -((ma + mb) * e.half_sum + (ma - mb) * e.half_diff));
    }
  }
  return m;
}

std::complex<double> character(const GroupId& group, const DualIndex& index, const GroupPoint& x) {
  check_index(group, index);
  if (group.is_torus()) return representation_matrix(group, index, x)(0, 0);
  if (!x.is_su2()) throw InvalidArgument("point does not belong to SU2");
  // Re tr X / 2 = cos(|X| / 2); the character is the Chebyshev polynomial U_{2l} there.
  const double c = x.as_su2().q[0];
  const int n = std::get<Su2Spin>(index).two_l;
  double u0 = 1.0, u1 = 2.0 * c;
  if (n == 0) return u0;
  for (int k = 2; k <= n; ++k) {
    double u2 = 2.0 * c * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  return u1;
}

}  // namespace lieosc

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lieosc/errors.hpp"
#include "lieosc/hormander.hpp"

using namespace lieosc;

namespace {

constexpr double kPi = std::numbers::pi;

BandLimitedKernel exponential_kernel(GridPtr grid, int ell, double bandwidth) {
  return BandLimitedKernel::from_synthesis(
      synthesize_kernel(indicator_symbol(grid->group(), TorusFreq{{ell}}), grid, bandwidth, Regularization::none()));
}

// Closed form for K = e_1 on T^1: the integrand is the constant |e^{-2 pi i y} - 1|.
double e1_closed_form(double y, double radius, double theta) {
  return std::abs(std::polar(1.0, -2 * kPi * y) - 1.0) * (1.0 - std::min(4.0 * std::pow(radius, 1.0 - theta), 1.0));
}

// Brute-force quadrature of |K(x - y) - K(x)| from closed-form K values.
double brute_force(const QuadratureGrid& g, const std::function<Complex(double)>& k, double y, double cutoff) {
  double s = 0.0;
  // The region {|x| >= diam} is null in the continuum even though x = 1/2 is a node.
  if (cutoff >= g.group().diameter()) return 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.norms()[i] < cutoff) continue;
    const double x = g.point(i).as_torus().coords[0];
    s += g.weight(i) * std::abs(k(x - y) - k(x));
  }
  return s;
}

}  // namespace

TEST(InnerIntegral, ConstantKernelIsZero) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto k = exponential_kernel(g, 0, 50.0);
  EXPECT_EQ(inner_integral(k, GroupPoint::torus({0.01}), 0.02, 0.5).value, 0.0);
  auto s = build_grid(GroupId::su2(), 6);
  auto ks = BandLimitedKernel::from_synthesis(
      synthesize_kernel(indicator_symbol(s->group(), Su2Spin{0}), s, 2.0, Regularization::none()));
  EXPECT_NEAR(inner_integral(ks, GroupPoint::su2_exp({0.05, 0.0, 0.0}), 0.1, 0.3).value, 0.0, 1e-13);
}

TEST(InnerIntegral, EmptyRegionIsZero) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto k = exponential_kernel(g, 1, 50.0);
  // 2 R^{1 - theta} = 2 * 0.0625^0.25 = 1 >= 1/2.
  auto v = inner_integral(k, GroupPoint::torus({0.05}), 0.0625, 0.75);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.quadrature_error, 0.0);
  EXPECT_DOUBLE_EQ(hormander_cutoff(GroupId::torus(1), 0.0625, 0.75), 0.5);
}

TEST(InnerIntegral, ExponentialClosedForm) {
  auto g = build_grid(GroupId::torus(1), 512);
  auto k = exponential_kernel(g, 1, 50.0);
  for (double theta : {0.0, 0.3, 0.6})
    for (double radius : {0.001, 0.01, 0.05})
      for (double frac : {-1.0, 0.3, 1.0}) {
        const double y = frac * radius;
        const double v = inner_integral(k, GroupPoint::torus({y}), radius, theta).value;
        // The region's grid measure differs from its true measure by at most two cells.
        EXPECT_NEAR(v, e1_closed_form(y, radius, theta), 2.0 / 1024 * 2.0 + 1e-12);
        const double cutoff = hormander_cutoff(g->group(), radius, theta);
        const double bf = brute_force(*g, [](double x) { return std::polar(1.0, 2 * kPi * x); }, y, cutoff);
        EXPECT_NEAR(v, bf, 1e-12);
      }
}

TEST(InnerIntegral, Preconditions) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto k = exponential_kernel(g, 1, 50.0);
  EXPECT_THROW(inner_integral(k, GroupPoint::torus({0.2}), 0.1, 0.5), PreconditionViolation);
  EXPECT_THROW(inner_integral(k, GroupPoint::torus({0.0}), 0.0, 0.5), InvalidArgument);
  EXPECT_THROW(inner_integral(k, GroupPoint::torus({0.0}), 0.1, 1.0), InvalidArgument);
  EXPECT_THROW(inner_integral(k, identity(GroupId::su2()), 0.1, 0.5), InvalidArgument);
}

TEST(InnerIntegral, NonincreasingInThetaForSmallRadii) {
  auto g = build_grid(GroupId::torus(1), 1024);
  auto k = BandLimitedKernel::from_synthesis(
      synthesize_kernel(oscillating_symbol(g->group(), 0.5), g, 256.0, Regularization::gaussian(256.0)));
  for (double radius : {1e-3, 1e-2, 0.05}) {
    const GroupPoint y = GroupPoint::torus({0.7 * radius});
    double prev = std::numeric_limits<double>::infinity();
    for (double theta : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      const double v = inner_integral(k, y, radius, theta).value;
      EXPECT_LE(v, prev + 1e-15) << radius << " " << theta;
      prev = v;
    }
  }
}

TEST(InnerIntegral, AutomorphismCovariance) {
  // Swapping or negating torus coordinates maps the grid to itself and preserves the
  // norm, so it must commute exactly with the inner integral.
  auto g = build_grid(GroupId::torus(2), 16);
  const double L = 40.0;
  auto k = synthesize_kernel(oscillating_symbol(g->group(), 0.4), g, L, Regularization::none());
  const int m = 32;
  auto swapped = GridFunction::zeros(g), negated = GridFunction::zeros(g);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      swapped[a * m + b] = k.kernel[b * m + a];
      negated[a * m + b] = k.kernel[((m - a) % m) * m + (m - b) % m];
    }
  auto base = BandLimitedKernel::from_synthesis(k);
  auto ks = BandLimitedKernel::from_samples(swapped, L), kn = BandLimitedKernel::from_samples(negated, L);
  const double y0 = 0.011, y1 = -0.027, radius = 0.04, theta = 0.4;
  const double v = inner_integral(base, GroupPoint::torus({y0, y1}), radius, theta).value;
  EXPECT_NEAR(inner_integral(ks, GroupPoint::torus({y1, y0}), radius, theta).value, v, 1e-10 * v);
  EXPECT_NEAR(inner_integral(kn, GroupPoint::torus({-y0, -y1}), radius, theta).value, v, 1e-10 * v);
}

TEST(SeminormYSamples, DesignProperties) {
  for (auto grp : {GroupId::torus(1), GroupId::torus(3), GroupId::su2()}) {
    auto pts = seminorm_y_samples(grp, 0.1, 10, 5);
    ASSERT_EQ(pts.size(), 10u + 2 * grp.dimension());
    for (const auto& p : pts) EXPECT_LE(geodesic_norm(p), 0.1 * (1 + 1e-12));
    for (std::size_t k = 10; k < pts.size(); ++k) EXPECT_NEAR(geodesic_norm(pts[k]), 0.1, 1e-12);
    auto more = seminorm_y_samples(grp, 0.1, 11, 5);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_LE(distance(more[k], pts[k]), 1e-15);
    auto other = seminorm_y_samples(grp, 0.1, 10, 6);
    EXPECT_GT(distance(other[0], pts[0]), 0.0);
  }
}

TEST(EstimateSeminorm, ConstantKernelIsZero) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto e = estimate_seminorm(exponential_kernel(g, 0, 50.0), 0.5, log_spaced(1e-3, 0.1, 5), 4);
  EXPECT_EQ(e.value, 0.0);
  ASSERT_EQ(e.per_r.size(), 5u);
  for (const auto& r : e.per_r) EXPECT_EQ(r.sup_y, 0.0);
}

TEST(EstimateSeminorm, ExponentialMatchesAnalyticMaximum) {
  // Oracle: maximize 2 sin(pi R) (1 - 4R) over R by a fine scan; y = R is optimal.
  double best = 0.0;
  for (int i = 1; i < 250000; ++i) {
    const double r = 0.25 * i / 250000.0;
    best = std::max(best, e1_closed_form(r, r, 0.0));
  }
  auto g = build_grid(GroupId::torus(1), 1024);
  auto e = estimate_seminorm(exponential_kernel(g, 1, 50.0), 0.0, log_spaced(1e-3, 0.25, 80), 4, 3);
  EXPECT_NEAR(e.value, best, 0.05 * best);
  double mx = 0.0;
  for (const auto& r : e.per_r) mx = std::max(mx, r.sup_y);
  EXPECT_EQ(e.value, mx);
}

TEST(EstimateSeminorm, MonotoneUnderRefinement) {
  auto g = build_grid(GroupId::torus(1), 512);
  auto k = BandLimitedKernel::from_synthesis(
      synthesize_kernel(oscillating_symbol(g->group(), 0.5), g, 128.0, Regularization::none()));
  auto coarse = log_spaced(1e-4, 0.06, 6);
  auto fine = coarse;
  for (double r : log_spaced(1.3e-4, 0.05, 7)) fine.push_back(r);
  auto a = estimate_seminorm(k, 0.5, coarse, 4, 9);
  auto b = estimate_seminorm(k, 0.5, fine, 4, 9);
  auto c = estimate_seminorm(k, 0.5, fine, 9, 9);
  EXPECT_LE(a.value, b.value);
  EXPECT_LE(b.value, c.value);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    EXPECT_EQ(a.per_r[i].sup_y, b.per_r[i].sup_y);
    EXPECT_LE(b.per_r[i].sup_y, c.per_r[i].sup_y);
  }
}

TEST(EstimateSeminorm, Validation) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto k = exponential_kernel(g, 1, 50.0);
  EXPECT_THROW(estimate_seminorm(k, 0.5, {}, 4), InvalidArgument);
  EXPECT_THROW(estimate_seminorm(k, 0.5, {0.1}, 0), InvalidArgument);
  EXPECT_THROW(estimate_seminorm(k, 0.5, {0.6}, 2), InvalidArgument);
  EXPECT_THROW(estimate_seminorm(k, 1.0, {0.1}, 2), InvalidArgument);
}

TEST(LogSpaced, Endpoints) {
  auto r = log_spaced(1e-3, 1e-1, 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], 1e-3);
  EXPECT_NEAR(r[1], 1e-2, 1e-15);
  EXPECT_EQ(r[2], 1e-1);
  EXPECT_THROW(log_spaced(0.0, 1.0, 3), InvalidArgument);
}

TEST(SeminormCsv, Header) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto e = estimate_seminorm(exponential_kernel(g, 1, 50.0), 0.0, {0.01, 0.02}, 2);
  const std::string csv = seminorm_csv(e);
  EXPECT_EQ(csv.rfind("R,sup_y,quad_error\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lieosc/errors.hpp"
#include "lieosc/group_fourier.hpp"

using namespace lieosc;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction exponential(GridPtr grid, std::vector<int> ell) {
  return GridFunction::from(grid, [&](const GroupPoint& x) {
    double phase = 0.0;
    for (std::size_t k = 0; k < ell.size(); ++k) phase += ell[k] * x.as_torus().coords[k];
    return std::polar(1.0, 2 * kPi * phase);
  });
}

FourierCoefficients random_coefficients(const GroupId& g, double bandwidth, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  auto c = FourierCoefficients::zeros(g, bandwidth);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (Eigen::Index r = 0; r < c.block(i).rows(); ++r)
      for (Eigen::Index s = 0; s < c.block(i).cols(); ++s) c.block(i)(r, s) = Complex(n01(rng), n01(rng));
  return c;
}

double max_block_difference(const FourierCoefficients& a, const FourierCoefficients& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.block(i) - b.block(i)).norm());
  return worst;
}

double sup_difference(const GridFunction& a, const GridFunction& b) { return (a - b).sup_norm(); }

// Band limit for spin two_l on SU(2): <xi> = sqrt(1 + l(l+1)).
double su2_bandwidth(int two_l) { return std::sqrt(1.0 + 0.25 * two_l * (two_l + 2)) + 1e-9; }

}  // namespace

TEST(GridFunction, NormsAndArithmetic) {
  auto g = build_grid(GroupId::torus(1), 8);
  auto one = GridFunction::constant(g, 2.0);
  EXPECT_NEAR(one.integral().real(), 2.0, 1e-15);
  EXPECT_NEAR(one.l1_norm(), 2.0, 1e-15);
  EXPECT_NEAR(one.l2_norm_squared(), 4.0, 1e-15);
  EXPECT_EQ(one.sup_norm(), 2.0);
  auto z = one - one;
  EXPECT_EQ(z.sup_norm(), 0.0);
  auto other = GridFunction::zeros(build_grid(GroupId::torus(1), 8));
  EXPECT_THROW(one += other, InvalidArgument);
  EXPECT_THROW(GridFunction(g, std::vector<Complex>(3)), InvalidArgument);
}

TEST(ForwardTransform, ConstantAndExponential) {
  auto g = build_grid(GroupId::torus(1), 16);
  const double L = 100.0;
  auto c = forward_transform(GridFunction::constant(g, 1.0), L);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double expect = c.index(i) == trivial_index(g->group()) ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(c.block(i)(0, 0) - expect), 0.0, 1e-10);
  }
  auto e3 = forward_transform(exponential(g, {3}), L);
  for (std::size_t i = 0; i < e3.size(); ++i) {
    const double expect = std::get<TorusFreq>(e3.index(i)).ell[0] == 3 ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(e3.block(i)(0, 0) - expect), 0.0, 1e-12);
  }
  EXPECT_NEAR(plancherel_energy(e3), 1.0, 1e-12);
}

TEST(ForwardTransform, Su2CharacterOracle) {
  auto g = build_grid(GroupId::su2(), 6);
  auto chi = GridFunction::from(g, [](const GroupPoint& x) { return character(GroupId::su2(), Su2Spin{1}, x); });
  auto c = forward_transform(chi, su2_bandwidth(4));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int two_l = std::get<Su2Spin>(c.index(i)).two_l;
    Matrix expect = two_l == 1 ? Matrix(0.5 * Matrix::Identity(2, 2)) : Matrix::Zero(two_l + 1, two_l + 1);
    EXPECT_LE((c.block(i) - expect).norm(), 1e-12) << two_l;
  }
  EXPECT_NEAR(plancherel_energy(c), 1.0, 1e-12);
  EXPECT_NEAR(chi.l2_norm_squared(), 1.0, 1e-12);
  auto back = inverse_transform(c, g);
  EXPECT_LE(sup_difference(back, chi), 1e-12);
}

TEST(ForwardTransform, RejectsUnresolvedBandwidth) {
  auto g = build_grid(GroupId::torus(1), 4);
  EXPECT_THROW(forward_transform(GridFunction::constant(g, 1.0), 30.0), ResolutionError);
  auto s = build_grid(GroupId::su2(), 4);
  EXPECT_THROW(forward_transform(GridFunction::constant(s, 1.0), su2_bandwidth(4)), ResolutionError);
}

TEST(InverseTransform, TrivialEntryGivesConstant) {
  auto g = build_grid(GroupId::torus(2), 4);
  auto c = FourierCoefficients::zeros(g->group(), 20.0);
  c.at(trivial_index(g->group()))(0, 0) = Complex(0.3, -2.0);
  auto f = inverse_transform(c, g);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(f[i] - Complex(0.3, -2.0)), 0.0, 1e-15);
  EXPECT_EQ(plancherel_energy(FourierCoefficients::zeros(g->group(), 20.0)), 0.0);
}

TEST(FourierRoundTrip, RandomBandLimitedFunctions) {
  std::mt19937_64 rng(21);
  struct Case {
    GroupId group;
    int resolution;
    double bandwidth;
  };
  const Case cases[] = {{GroupId::torus(1), 64, std::sqrt(1.0 + 4 * kPi * kPi * 32 * 32)},
                        {GroupId::torus(2), 8, 40.0},
                        {GroupId::torus(3), 6, 30.0},
                        {GroupId::su2(), 16, su2_bandwidth(8)}};
  for (const auto& c : cases) {
    auto g = build_grid(c.group, c.resolution);
    for (int k = 0; k < 10; ++k) {
      auto fhat = random_coefficients(c.group, c.bandwidth, rng);
      auto f = inverse_transform(fhat, g);
      auto again = forward_transform(f, c.bandwidth);
      const double e = plancherel_energy(fhat);
      EXPECT_LE(max_block_difference(fhat, again), 1e-9 * std::sqrt(e)) << c.group.name();
      EXPECT_NEAR(f.l2_norm_squared(), e, 1e-10 * e) << c.group.name();
    }
  }
}

TEST(FourierInnerProduct, MatchesGridInnerProduct) {
  std::mt19937_64 rng(4);
  auto g = build_grid(GroupId::su2(), 8);
  const double L = su2_bandwidth(5);
  auto a = random_coefficients(g->group(), L, rng), b = random_coefficients(g->group(), L, rng);
  auto fa = inverse_transform(a, g), fb = inverse_transform(b, g);
  Complex grid = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) grid += g->weight(i) * fa[i] * std::conj(fb[i]);
  EXPECT_NEAR(std::abs(fourier_inner_product(a, b) - grid), 0.0, 1e-10 * std::abs(grid) + 1e-12);
}

TEST(EvaluateSeries, AgreesWithInverseOnGrid) {
  std::mt19937_64 rng(8);
  for (auto grp : {GroupId::torus(2), GroupId::su2()}) {
    auto g = build_grid(grp, 6);
    auto c = random_coefficients(grp, grp.is_su2() ? su2_bandwidth(4) : 30.0, rng);
    auto f = inverse_transform(c, g);
    for (std::size_t i = 0; i < g->size(); i += 17)
      EXPECT_NEAR(std::abs(evaluate_series(c, g->point(i)) - f[i]), 0.0, 1e-11);
  }
}

TEST(FourierCoefficients, JsonRoundTrip) {
  std::mt19937_64 rng(9);
  for (auto grp : {GroupId::torus(2), GroupId::su2()}) {
    auto c = random_coefficients(grp, 12.0, rng);
    auto back = FourierCoefficients::from_json(c.to_json());
    ASSERT_EQ(back.size(), c.size());
    EXPECT_EQ(back.group(), c.group());
    EXPECT_EQ(max_block_difference(c, back), 0.0);
  }
  EXPECT_THROW(FourierCoefficients::zeros(GroupId::su2(), 4.0).at(Su2Spin{40}), InvalidArgument);
}

TEST(Convolution, Examples) {
  auto g = build_grid(GroupId::torus(1), 16);
  const double L = 100.0;
  auto e2 = forward_transform(exponential(g, {2}), L);
  auto conv = inverse_transform(convolve_fourier(e2, e2), g);
  EXPECT_LE(sup_difference(conv, exponential(g, {2})), 1e-12);

  std::mt19937_64 rng(1);
  auto fhat = random_coefficients(g->group(), L, rng);
  auto one = FourierCoefficients::zeros(g->group(), L);
  one.at(trivial_index(g->group()))(0, 0) = 1.0;
  auto mean = convolve_fourier(fhat, one);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (mean.index(i) == trivial_index(g->group()))
      EXPECT_NEAR(std::abs(mean.block(i)(0, 0) - fhat.block(i)(0, 0)), 0.0, 1e-15);
    else
      EXPECT_EQ(mean.block(i).norm(), 0.0);
  }

  auto f = inverse_transform(fhat, g);
  auto zero = convolve_direct(f, GridFunction::zeros(g), {KernelEvaluation::NearestGrid, 0});
  EXPECT_EQ(zero.sup_norm(), 0.0);
  auto k = inverse_transform(random_coefficients(g->group(), L, rng), g);
  auto flat = convolve_direct(GridFunction::constant(g, 1.0), k, {KernelEvaluation::Resynthesis, L});
  for (std::size_t i = 0; i < flat.size(); ++i) EXPECT_NEAR(std::abs(flat[i] - k.integral()), 0.0, 1e-10);
}

TEST(Convolution, DirectMatchesFourierOnSu2) {
  std::mt19937_64 rng(13);
  auto g = build_grid(GroupId::su2(), 6);
  const double L = su2_bandwidth(4);
  auto fhat = random_coefficients(g->group(), L, rng), khat = random_coefficients(g->group(), L, rng);
  auto f = inverse_transform(fhat, g), k = inverse_transform(khat, g);
  auto direct = convolve_direct(f, k, {KernelEvaluation::Resynthesis, L});
  auto spectral = inverse_transform(convolve_fourier(fhat, khat), g);
  EXPECT_LE(sup_difference(direct, spectral), 1e-10 * spectral.sup_norm());
  EXPECT_THROW(convolve_direct(f, k, {KernelEvaluation::Resynthesis, 0.0}), InvalidArgument);
}

TEST(Convolution, ClosedFormKernelOverload) {
  auto g = build_grid(GroupId::torus(1), 16);
  auto f = exponential(g, {1});
  auto out = convolve_direct(f, [](const GroupPoint& x) { return std::polar(1.0, 2 * kPi * x.as_torus().coords[0]); });
  EXPECT_LE(sup_difference(out, f), 1e-12);
}

TEST(LeftTranslate, MatchesPointwiseTranslation) {
  std::mt19937_64 rng(17);
  for (auto grp : {GroupId::torus(3), GroupId::su2()}) {
    auto g = build_grid(grp, 6);
    auto c = random_coefficients(grp, grp.is_su2() ? su2_bandwidth(3) : 25.0, rng);
    const GroupPoint y = grp.is_su2() ? GroupPoint::su2(0.2, 0.5, -0.3, 0.9) : GroupPoint::torus({0.13, 0.7, 0.41});
    auto t = left_translate(c, y);
    for (std::size_t i = 0; i < g->size(); i += 29)
      EXPECT_NEAR(std::abs(evaluate_series(t, g->point(i)) - evaluate_series(c, compose(invert(y), g->point(i)))), 0.0,
                  1e-10);
  }
}

TEST(Convolution, YoungInequality) {
  std::mt19937_64 rng(23);
  auto g = build_grid(GroupId::torus(1), 32);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    auto f = GridFunction::from(g, [&](const GroupPoint&) { return Complex(u(rng), u(rng)); });
    auto kern = GridFunction::from(g, [&](const GroupPoint&) { return Complex(u(rng), 0.0); });
    auto c = convolve_direct(f, kern, {KernelEvaluation::NearestGrid, 0});
    EXPECT_LE(c.l1_norm(), f.l1_norm() * kern.l1_norm() * (1 + 1e-12));
  }
}

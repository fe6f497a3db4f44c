#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lieosc/cz.hpp"
#include "lieosc/errors.hpp"

using namespace lieosc;

namespace {

GridFunction step(GridPtr grid, double lo, double hi, double height) {
  return GridFunction::from(grid, [&](const GroupPoint& x) {
    const double t = x.as_torus().coords[0];
    return Complex(t >= lo && t < hi ? height : 0.0);
  });
}

// Sparse random bumps: a few heavy points on a small background, so the stopping
// time selects cells at several levels.
GridFunction random_function(GridPtr grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::exponential_distribution<double> heavy(0.05);
  auto f = GridFunction::from(grid, [&](const GroupPoint&) { return Complex(0.1 * u(rng), 0.1 * u(rng)); });
  const int spikes = 1 + static_cast<int>(rng() % 6);
  for (int s = 0; s < spikes; ++s) {
    const std::size_t c = rng() % f.size();
    const std::size_t w = 1 + rng() % 8;
    for (std::size_t k = 0; k < w && c + k < f.size(); ++k) f[c + k] = Complex(heavy(rng), u(rng));
  }
  return f;
}

std::vector<double> altitudes(const GridFunction& f) {
  const double mean = f.l1_norm(), top = f.sup_norm();
  std::vector<double> out;
  for (int k = 0; k < 5; ++k) out.push_back(mean * std::pow(top / mean, (k + 0.5) / 5.0));
  return out;
}

std::set<std::size_t> bad_points(const CzDecomposition& d) {
  std::set<std::size_t> s;
  for (const auto& b : d.bad) s.insert(b.members.begin(), b.members.end());
  return s;
}

}  // namespace

TEST(DyadicSystem, TorusDepthThree) {
  auto g = build_grid(GroupId::torus(1), 16);
  auto sys = build_dyadic_system(g, 3);
  ASSERT_EQ(sys.depth(), 3);
  ASSERT_EQ(sys.levels[3].size(), 8u);
  for (const auto& c : sys.levels[3]) {
    EXPECT_DOUBLE_EQ(c.diameter, 0.125);
    EXPECT_DOUBLE_EQ(c.measure, 0.125);
    EXPECT_EQ(c.members.size(), 4u);
  }
  EXPECT_DOUBLE_EQ(sys.levels[0][0].measure, 1.0);
  EXPECT_DOUBLE_EQ(sys.max_refinement_ratio(), 2.0);
  EXPECT_THROW(build_dyadic_system(g, 0), InvalidArgument);
  EXPECT_THROW(build_dyadic_system(g, 6), InvalidArgument);
  EXPECT_EQ(max_dyadic_depth(*g), 5);
  EXPECT_EQ(max_dyadic_depth(*build_grid(GroupId::torus(1), 12)), 3);
}

TEST(DyadicSystem, PartitionAndNesting) {
  struct Case {
    GroupId group;
    int resolution, depth;
  };
  for (const auto& c : {Case{GroupId::torus(2), 8, 4}, Case{GroupId::torus(3), 4, 3}, Case{GroupId::su2(), 8, 4}}) {
    auto g = build_grid(c.group, c.resolution);
    auto sys = build_dyadic_system(g, c.depth);
    for (int k = 0; k <= sys.depth(); ++k) {
      std::vector<int> seen(g->size(), 0);
      double total = 0.0;
      for (std::size_t cell = 0; cell < sys.levels[k].size(); ++cell) {
        const auto& cl = sys.levels[k][cell];
        total += cl.measure;
        for (std::size_t i : cl.members) {
          ++seen[i];
          EXPECT_EQ(sys.cell_of_point[k][i], static_cast<int>(cell));
          if (k > 0) EXPECT_EQ(sys.cell_of_point[k - 1][i], cl.parent);
          EXPECT_LE(distance(g->point(i), cl.center), cl.diameter + 1e-12);
        }
      }
      for (int s : seen) EXPECT_EQ(s, 1);
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(DyadicSystem, Su2CellsShrinkByHalvingBoxes) {
  auto g = build_grid(GroupId::su2(), 8);
  EXPECT_EQ(max_dyadic_depth(*g), 4);
  EXPECT_THROW(max_dyadic_depth(*build_grid(GroupId::su2(), 6)), InvalidArgument);
  auto sys = build_dyadic_system(g, 4);
  // alpha and gamma split evenly; the beta split follows whole Gauss-Legendre weights,
  // so a child can hold less than half of its parent's beta mass.
  EXPECT_LT(sys.max_refinement_ratio(), 16.0);
  EXPECT_GE(sys.max_refinement_ratio(), 8.0);
  // Every child has at most the parent's diameter, and from level 1 on the largest
  // diameter drops by at least a quarter per level until single points are reached.
  double prev_max = 1e9;
  for (int k = 0; k <= sys.depth(); ++k) {
    double mx = 0.0;
    for (const auto& c : sys.levels[k]) {
      mx = std::max(mx, c.diameter);
      if (k > 0) EXPECT_LE(c.diameter, sys.levels[k - 1][c.parent].diameter + 1e-12);
    }
    if (k >= 2) EXPECT_LE(mx, 0.75 * prev_max);
    prev_max = mx;
  }
  for (const auto& c : sys.levels[4]) EXPECT_EQ(c.members.size(), 1u);
}

TEST(Decompose, ConstantHasNoBadCells) {
  auto g = build_grid(GroupId::torus(2), 8);
  auto sys = build_dyadic_system(g, 3);
  auto f = GridFunction::constant(g, Complex(0.6, 0.8));
  auto d = decompose(f, 1.5, sys);
  EXPECT_TRUE(d.bad.empty());
  EXPECT_EQ((d.good - f).sup_norm(), 0.0);
  EXPECT_THROW(decompose(f, 1.0, sys), PreconditionViolation);
  EXPECT_THROW(decompose(f, 0.5, sys), PreconditionViolation);
}

TEST(Decompose, ZeroFunctionIsVacuous) {
  auto g = build_grid(GroupId::torus(1), 16);
  auto sys = build_dyadic_system(g, 4);
  auto f = GridFunction::zeros(g);
  auto d = decompose(f, 0.5, sys);
  EXPECT_TRUE(d.bad.empty());
  EXPECT_TRUE(verify_properties(d, f).all_passed());
}

TEST(Decompose, WorkedExample) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto sys = build_dyadic_system(g, 5);
  auto f = step(g, 0.0, 0.125, 8.0);
  EXPECT_DOUBLE_EQ(f.l1_norm(), 1.0);
  auto d = decompose(f, 2.0, sys);
  ASSERT_EQ(d.bad.size(), 1u);
  const auto& b = d.bad[0];
  EXPECT_EQ(b.level, 2);
  EXPECT_EQ(b.cell, 0);
  EXPECT_DOUBLE_EQ(b.measure, 0.25);
  EXPECT_EQ(b.mean, Complex(4.0));
  EXPECT_EQ(b.members.front(), 0u);
  EXPECT_EQ(b.members.size(), 32u);
  EXPECT_EQ(std::abs(b.integral(*g)), 0.0);
  EXPECT_DOUBLE_EQ(d.good.sup_norm(), 4.0);
  auto r = verify_properties(d, f);
  EXPECT_TRUE(r.all_passed());
  EXPECT_DOUBLE_EQ(r.check("total_measure").measured, 0.25);
  EXPECT_DOUBLE_EQ(r.check("total_measure").bound, 0.5);
  EXPECT_DOUBLE_EQ(r.check("good_sup").bound, 8.0);
  EXPECT_NO_THROW(r.require_all());
  EXPECT_THROW(r.check("nonexistent"), InvalidArgument);
}

TEST(Decompose, WorkedExampleByExhaustiveScan) {
  // Oracle: scan every dyadic interval directly from the step function.
  auto g = build_grid(GroupId::torus(1), 64);
  auto sys = build_dyadic_system(g, 6);
  auto f = step(g, 0.0, 0.125, 8.0);
  std::vector<std::pair<int, int>> maximal;
  for (int k = 1; k <= 6; ++k)
    for (int c = 0; c < (1 << k); ++c) {
      const double lo = static_cast<double>(c) / (1 << k), hi = static_cast<double>(c + 1) / (1 << k);
      const double overlap = std::max(0.0, std::min(hi, 0.125) - lo);
      const double mean = 8.0 * overlap / (hi - lo);
      bool parent_selected = false;
      for (const auto& [pk, pc] : maximal)
        if ((c >> (k - pk)) == pc) parent_selected = true;
      if (mean > 2.0 && !parent_selected) maximal.emplace_back(k, c);
    }
  auto d = decompose(f, 2.0, sys);
  ASSERT_EQ(d.bad.size(), maximal.size());
  for (std::size_t j = 0; j < maximal.size(); ++j) {
    EXPECT_EQ(d.bad[j].level, maximal[j].first);
    EXPECT_EQ(d.bad[j].cell, maximal[j].second);
  }
}

TEST(Decompose, RandomFunctionsSatisfyAllProperties) {
  std::mt19937_64 rng(31);
  struct Case {
    GroupId group;
    int resolution, depth, count;
  };
  const Case cases[] = {{GroupId::torus(1), 128, 8, 100}, {GroupId::torus(2), 16, 5, 100}, {GroupId::su2(), 8, 4, 20}};
  for (const auto& c : cases) {
    auto g = build_grid(c.group, c.resolution);
    auto sys = build_dyadic_system(g, c.depth);
    for (int k = 0; k < c.count; ++k) {
      auto f = random_function(g, rng);
      for (double alt : altitudes(f)) {
        auto d = decompose(f, alt, sys);
        auto r = verify_properties(d, f);
        for (const auto& p : r.checks) EXPECT_TRUE(p.passed) << c.group.name() << " " << p.name << " " << p.measured;
        // Maximality: no selected cell's parent has mean |f| above the altitude.
        for (const auto& b : d.bad) {
          if (b.level == 1) continue;
          const auto& parent = sys.levels[b.level - 1][sys.levels[b.level][b.cell].parent];
          double s = 0.0;
          for (std::size_t i : parent.members) s += g->weight(i) * std::abs(f[i]);
          EXPECT_LE(s / parent.measure, alt * (1 + 1e-12));
        }
      }
    }
  }
}

TEST(Decompose, RaisingAltitudeShrinksBadSet) {
  std::mt19937_64 rng(37);
  auto g = build_grid(GroupId::torus(2), 16);
  auto sys = build_dyadic_system(g, 5);
  for (int k = 0; k < 20; ++k) {
    auto f = random_function(g, rng);
    auto alts = altitudes(f);
    for (std::size_t a = 1; a < alts.size(); ++a) {
      auto lo = bad_points(decompose(f, alts[a - 1], sys)), hi = bad_points(decompose(f, alts[a], sys));
      EXPECT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
    }
  }
}

TEST(VerifyProperties, TamperedCancellationFails) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto sys = build_dyadic_system(g, 5);
  auto f = step(g, 0.0, 0.125, 8.0);
  auto d = decompose(f, 2.0, sys);
  d.bad[0].values[0] += 1.0;
  d.good[d.bad[0].members[0]] -= 1.0;  // keep the reconstruction exact
  auto r = verify_properties(d, f);
  EXPECT_FALSE(r.check("cancellation").passed);
  EXPECT_EQ(r.check("cancellation").violating_cell, 0);
  EXPECT_TRUE(r.check("reconstruction").passed);
  try {
    r.require_all();
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("cancellation"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bad cell 0"), std::string::npos);
  }
}

TEST(Mollifier, RadiusExamples) {
  EXPECT_DOUBLE_EQ(mollifier_radius(0.125, 0.0), 1.0 / 16);
  EXPECT_DOUBLE_EQ(mollifier_radius(1.0 / 16, 0.5), 1.0 / 1024);
  EXPECT_THROW(mollifier_radius(0.0, 0.5), InvalidArgument);
  EXPECT_THROW(mollifier_radius(0.1, 1.0), InvalidArgument);
}

TEST(Mollifier, NormalizedAndResolutionChecked) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto m = mollifier(0.125, 0.0, g);
  EXPECT_DOUBLE_EQ(m.radius, 1.0 / 16);
  // 15 of the 128 nodes lie in the open ball of radius 1/16, whose length is 1/8.
  EXPECT_NEAR(m.phi.integral().real(), 15.0 / 16, 1e-12);
  EXPECT_NEAR(m.quadrature_error, 1.0 / 16, 1e-12);
  auto s = mollifier(2.0, 0.0, build_grid(GroupId::su2(), 16));
  EXPECT_LE(s.quadrature_error, 0.1);
  try {
    mollifier(1.0 / 16, 0.5, g);
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_NE(std::string(e.what()).find("need B >= 1024"), std::string::npos) << e.what();
  }
  EXPECT_THROW(mollifier(0.9, 0.0, g), InvalidArgument);
}

TEST(SmoothBadPart, EmptyDecomposition) {
  auto g = build_grid(GroupId::torus(1), 16);
  auto sys = build_dyadic_system(g, 3);
  auto d = decompose(GridFunction::constant(g, 1.0), 2.0, sys);
  auto s = smooth_bad_part(d, 0.5, g, 50.0);
  EXPECT_EQ(s.total.sup_norm(), 0.0);
  EXPECT_TRUE(s.pieces.empty());
}

TEST(SmoothBadPart, WorkedExampleYoungAndCancellation) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto sys = build_dyadic_system(g, 5);
  auto f = step(g, 0.0, 0.125, 8.0);
  auto d = decompose(f, 2.0, sys);
  for (auto mode : {SmoothingMode::Fourier, SmoothingMode::Direct}) {
    auto s = smooth_bad_part(d, 0.0, g, 400.0, mode);
    ASSERT_EQ(s.pieces.size(), 1u);
    EXPECT_DOUBLE_EQ(s.radii[0], 0.125);
    EXPECT_LE(std::abs(s.pieces[0].integral()), 1e-8);
    if (mode == SmoothingMode::Direct) EXPECT_LE(s.total.l1_norm(), d.bad[0].l1_norm(*g) * (1 + 1e-6));
  }
}

TEST(SmoothBadPart, FourierMatchesDirectConvolution) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto sys = build_dyadic_system(g, 5);
  auto f = step(g, 0.3, 0.34, 20.0);
  auto d = decompose(f, 2.0, sys);
  ASSERT_FALSE(d.bad.empty());
  const double L = std::sqrt(1.0 + 4 * std::numbers::pi * std::numbers::pi * 63.0 * 63.0);
  auto fourier = smooth_bad_part(d, 0.0, g, L, SmoothingMode::Fourier);
  for (std::size_t j = 0; j < d.bad.size(); ++j) {
    auto phi = mollifier(d.bad[j].diameter, 0.0, g).phi;
    auto direct = convolve_direct(d.bad[j].to_grid_function(g), phi, {KernelEvaluation::NearestGrid, 0});
    // Cyclic convolution on the grid has exactly the product of the grid transforms.
    auto a = forward_transform(fourier.pieces[j], L), b = forward_transform(direct, L);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a.block(i)(0, 0) - b.block(i)(0, 0)), 0.0, 1e-12);
  }
}

TEST(SmoothBadPart, SupportInflation) {
  std::mt19937_64 rng(41);
  for (auto grp : {GroupId::torus(1), GroupId::torus(2)}) {
    // Depths chosen so every cell's mollifier radius is resolved.
    auto g = build_grid(grp, grp.dimension() == 1 ? 128 : 32);
    auto sys = build_dyadic_system(g, grp.dimension() == 1 ? 6 : 4);
    for (int k = 0; k < 5; ++k) {
      auto f = random_function(g, rng);
      auto d = decompose(f, altitudes(f)[3], sys);
      auto s = smooth_bad_part(d, 0.0, g, 10.0, SmoothingMode::Direct);
      for (std::size_t j = 0; j < d.bad.size(); ++j) {
        for (std::size_t x = 0; x < g->size(); ++x) {
          if (std::abs(s.pieces[j][x]) <= 1e-8) continue;
          double dist = 1e9;
          for (std::size_t i : d.bad[j].members) dist = std::min(dist, distance(g->point(x), g->point(i)));
          EXPECT_LE(dist, s.radii[j] + 1e-12);
        }
      }
    }
  }
}

TEST(SmoothBadPart, UnresolvedCellsAreListed) {
  auto g = build_grid(GroupId::torus(1), 16);
  auto sys = build_dyadic_system(g, 5);
  auto f = step(g, 0.0, 0.125, 8.0) + step(g, 0.5, 0.625, 8.0);
  auto d = decompose(f, 2.5, sys);
  ASSERT_EQ(d.bad.size(), 2u);
  try {
    smooth_bad_part(d, 0.5, g, 50.0);
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[0, 1]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("need B >= 64"), std::string::npos) << msg;
  }
}

TEST(CzSummary, JsonShape) {
  auto g = build_grid(GroupId::torus(1), 64);
  auto sys = build_dyadic_system(g, 5);
  auto f = step(g, 0.0, 0.125, 8.0);
  auto d = decompose(f, 2.0, sys);
  auto j = cz_summary_json(d, verify_properties(d, f));
  EXPECT_EQ(j["altitude"], 2.0);
  EXPECT_EQ(j["cells"].size(), 1u);
  EXPECT_EQ(j["cells"][0]["mean"][0], 4.0);
  EXPECT_EQ(j["properties"].size(), 8u);
  EXPECT_TRUE(j["all_passed"].get<bool>());
}

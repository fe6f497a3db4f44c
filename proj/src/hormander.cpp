#include "lieosc/hormander.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "lieosc/errors.hpp"

namespace lieosc {

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

// Integrates |Ky - K0| over the region with the full grid and both interleaved halves.
InnerIntegral region_integral(const GridFunction& ky, const GridFunction& k0, double cutoff) {
  const auto& g = k0.grid_ref();
  const auto& norms = g.norms();
  std::vector<double> full(g.size(), 0.0), even(g.size(), 0.0), odd(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (norms[i] < cutoff) continue;
    const double v = g.weight(i) * std::abs(ky[i] - k0[i]);
    full[i] = v;
    (i % 2 == 0 ? even : odd)[i] = 2.0 * v;
  }
  return {pairwise_sum(full), std::abs(pairwise_sum(even) - pairwise_sum(odd))};
}

void check_radius_theta(double radius, double theta) {
  if (!(radius > 0.0)) throw InvalidArgument("radius R must be positive");
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in the range [0,1)");
}

}  // namespace

BandLimitedKernel BandLimitedKernel::from_synthesis(const KernelSynthesis& k) {
  return {k.coefficients, k.kernel.grid()};
}

BandLimitedKernel BandLimitedKernel::from_samples(const GridFunction& k, double bandwidth) {
  return {forward_transform(k, bandwidth), k.grid()};
}

double hormander_cutoff(const GroupId& group, double radius, double theta) {
  check_radius_theta(radius, theta);
  return std::min(2.0 * std::pow(radius, 1.0 - theta), group.diameter());
}

InnerIntegral inner_integral(const BandLimitedKernel& kernel, const GroupPoint& y, double radius, double theta) {
  check_radius_theta(radius, theta);
  if (y.group() != kernel.grid->group()) throw InvalidArgument("translation point belongs to another group");
  if (geodesic_norm(y) > radius * (1.0 + 1e-12))
    throw PreconditionViolation("translation |y| exceeds the radius R");
  const double cutoff = hormander_cutoff(kernel.grid->group(), radius, theta);
  if (cutoff >= kernel.grid->group().diameter()) return {};
  const GridFunction k0 = inverse_transform(kernel.coefficients, kernel.grid);
  const GridFunction ky = inverse_transform(left_translate(kernel.coefficients, y), kernel.grid);
  return region_integral(ky, k0, cutoff);
}

std::vector<GroupPoint> seminorm_y_samples(const GroupId& group, double radius, int count, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("radius R must be positive");
  if (count < 0) throw InvalidArgument("sample count must be nonnegative");
  const int n = group.dimension();
  static constexpr unsigned kBases[3] = {2, 3, 5};
  std::mt19937_64 rng(seed);
  double shift[3];
  for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  auto make = [&](const std::array<double, 3>& v) {
    if (group.is_su2()) return GroupPoint::su2_exp(v);
    return GroupPoint::torus(std::vector<double>(v.begin(), v.begin() + n));
  };

  std::vector<GroupPoint> out;
  out.reserve(count + 2 * n);
  for (std::uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
    std::array<double, 3> v{0.0, 0.0, 0.0};
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) {
      double u = radical_inverse(i, kBases[k]) + shift[k];
      u -= std::floor(u);
      v[k] = radius * (2.0 * u - 1.0);
      r2 += v[k] * v[k];
    }
    if (r2 <= radius * radius) out.push_back(make(v));
  }
  for (int k = 0; k < n; ++k)
    for (double s : {1.0, -1.0}) {
      std::array<double, 3> v{0.0, 0.0, 0.0};
      v[k] = s * radius;
      out.push_back(make(v));
    }
  return out;
}

SeminormEstimate estimate_seminorm(const BandLimitedKernel& kernel, double theta, const std::vector<double>& r_grid,
                                   int y_samples, std::uint64_t seed) {
  if (r_grid.empty()) throw InvalidArgument("R grid must be nonempty");
  if (y_samples < 1) throw InvalidArgument("y sample count must be at least 1");
  const GroupId& group = kernel.grid->group();
  for (double r : r_grid)
    if (!(r > 0.0 && r <= group.diameter())) throw InvalidArgument("R grid values must lie in (0, diameter]");
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in the range [0,1)");

  SeminormEstimate est;
  est.theta = theta;
  est.y_samples = y_samples;
  est.seed = seed;
  est.r_grid = r_grid;
  est.grid = kernel.grid;
  const GridFunction k0 = inverse_transform(kernel.coefficients, kernel.grid);
  for (double r : r_grid) {
    SeminormRow row{r, 0.0, 0.0};
    const double cutoff = hormander_cutoff(group, r, theta);
    if (cutoff < group.diameter()) {
      for (const auto& y : seminorm_y_samples(group, r, y_samples, seed)) {
        const GridFunction ky = inverse_transform(left_translate(kernel.coefficients, y), kernel.grid);
        const InnerIntegral v = region_integral(ky, k0, cutoff);
        if (v.value > row.sup_y) {
          row.sup_y = v.value;
          row.quadrature_error = v.quadrature_error;
        }
      }
    }
    est.value = std::max(est.value, row.sup_y);
    est.per_r.push_back(row);
  }
  return est;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw InvalidArgument("log_spaced needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::string seminorm_csv(const SeminormEstimate& estimate) {
  std::ostringstream out;
  out << "R,sup_y,quad_error\n";
  char buf[96];
  for (const auto& row : estimate.per_r) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.radius, row.sup_y, row.quadrature_error);
    out << buf;
  }
  return out.str();
}

}  // namespace lieosc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lieosc/multipliers.hpp"

namespace lieosc {

/// A kernel known through its band-limited Fourier series, sampled on a grid.
struct BandLimitedKernel {
  FourierCoefficients coefficients;
  GridPtr grid;

  static BandLimitedKernel from_synthesis(const KernelSynthesis& k);
  static BandLimitedKernel from_samples(const GridFunction& k, double bandwidth);
};

struct InnerIntegral {
  double value = 0;
  double quadrature_error = 0;  // spread between the two interleaved half-grid rules
};

/// Radius of the excluded ball, min(2 R^{1-theta}, diameter).
double hormander_cutoff(const GroupId& group, double radius, double theta);

/// Quadrature of |K(y^{-1}x) - K(x)| over {x : d(x,e) >= min(2 R^{1-theta}, diam G)}.
/// Requires 0 < R, 0 <= theta < 1 and |y| <= R.
InnerIntegral inner_integral(const BandLimitedKernel& kernel, const GroupPoint& y, double radius, double theta);

/// Deterministic y design for one radius: the first `count` points of a shifted
/// Halton sequence in B(e, R), then 2n points on the sphere of radius R.
/// The interior part for `count` is a prefix of the one for `count + 1`.
std::vector<GroupPoint> seminorm_y_samples(const GroupId& group, double radius, int count, std::uint64_t seed);

struct SeminormRow {
  double radius = 0;
  double sup_y = 0;
  double quadrature_error = 0;
};

struct SeminormEstimate {
  double value = 0;  // max over per_r; a lower bound for the sampled configuration
  double theta = 0;
  int y_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> r_grid;
  std::vector<SeminormRow> per_r;
  GridPtr grid;
};

SeminormEstimate estimate_seminorm(const BandLimitedKernel& kernel, double theta,
                                   const std::vector<double>& r_grid, int y_samples,
                                   std::uint64_t seed = 0);

/// count log-spaced radii in [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

/// CSV (R, sup_y, quad_error) with header.
std::string seminorm_csv(const SeminormEstimate& estimate);

}  // namespace lieosc

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lieosc/group_fourier.hpp"

namespace lieosc {

/// Spectral multiplier: a scalar per dual index, acting as scalar * identity on H_xi.
class MultiplierSymbol {
 public:
  using Rule = std::function<Complex(const DualIndex&)>;

  MultiplierSymbol(GroupId group, Rule rule, std::string label);

  const GroupId& group() const { return group_; }
  const std::string& label() const { return label_; }
  Complex operator()(const DualIndex& index) const;

  /// Symbol of the composition of two spectral multipliers.
  static MultiplierSymbol product(const MultiplierSymbol& a, const MultiplierSymbol& b);

 private:
  GroupId group_;
  Rule rule_;
  std::string label_;
};

/// <xi>^{-n theta / 2} exp(i <xi>^theta), the symbol of T_theta(L_G). Requires 0 <= theta < 1.
MultiplierSymbol oscillating_symbol(const GroupId& group, double theta);

/// <xi>^{-s}, the Bessel potential of order s >= 0.
MultiplierSymbol bessel_symbol(const GroupId& group, double s);

/// exp(i <xi>^theta) with no decay factor.
MultiplierSymbol pure_oscillation_symbol(const GroupId& group, double theta);

/// exp(-t lambda_xi), the heat semigroup.
MultiplierSymbol heat_symbol(const GroupId& group, double t);

MultiplierSymbol identity_symbol(const GroupId& group);
MultiplierSymbol zero_symbol(const GroupId& group);

/// 1 at `index`, 0 elsewhere.
MultiplierSymbol indicator_symbol(const GroupId& group, const DualIndex& index);

/// Tf = inverse_transform({rule(xi) f^(xi)}).
GridFunction apply_multiplier(const MultiplierSymbol& symbol, const GridFunction& f, double bandwidth);

struct Regularization {
  enum class Kind { None, Gaussian };
  Kind kind = Kind::None;
  double sigma = 0;

  static Regularization none() { return {}; }
  static Regularization gaussian(double sigma);

  /// m(xi) = 1 or exp(-lambda_xi / sigma^2).
  double damping(double eigenvalue) const;
};

struct KernelSynthesis {
  GridFunction kernel;
  FourierCoefficients coefficients;
  double bandwidth = 0;
  Regularization regularization;
  std::string label;
};

/// K_L(x) = sum_{<xi> <= L} d_xi m(xi) rule(xi) Tr[xi(x)].
KernelSynthesis synthesize_kernel(const MultiplierSymbol& symbol, GridPtr grid, double bandwidth,
                                  Regularization regularization);

struct DecayLevel {
  double bandwidth = 0;
  double constant = 0;
};

struct DecayReport {
  double constant = 0;  // C_L = max_{<xi> <= L} |rule(xi)| <xi>^{n theta / 2}
  bool admissible = false;
  std::vector<DecayLevel> levels;  // dyadic bandwidths L, L/2, ... >= 1, increasing
};

/// Relative growth of C between consecutive dyadic bandwidths tolerated by the flag.
inline constexpr double kDecayGrowthTolerance = 0.01;

DecayReport verify_decay(const MultiplierSymbol& symbol, double theta, double bandwidth);

struct RadialWindow {
  double lo = 0;
  double hi = 0;
};

struct EnvelopeBin {
  double center = 0;  // geometric center of the bin
  double max_abs = 0;
};

struct EnvelopeFit {
  double slope = 0;
  double intercept = 0;
  std::vector<EnvelopeBin> bins;  // non-empty bins only
};

inline constexpr int kEnvelopeBins = 64;
inline constexpr int kEnvelopeMinBins = 8;

/// Least-squares fit of log(bin-max |K|) against log d(x, e) over logarithmic bins.
EnvelopeFit envelope_fit(const KernelSynthesis& kernel, RadialWindow window, int bins = kEnvelopeBins);
double envelope_slope(const KernelSynthesis& kernel, RadialWindow window);

/// Rows (distance, re, im, abs) sorted by distance; header included.
std::string kernel_csv(const GridFunction& kernel);

}  // namespace lieosc

#include "lieosc/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "lieosc/errors.hpp"

namespace lieosc {

namespace {

double weight_of(const GroupId& group, const DualIndex& index) { return spectral_data(group, index).weight; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

MultiplierSymbol::MultiplierSymbol(GroupId group, Rule rule, std::string label)
    : group_(group), rule_(std::move(rule)), label_(std::move(label)) {
  if (!rule_) throw InvalidArgument("multiplier symbol needs a rule");
}

Complex MultiplierSymbol::operator()(const DualIndex& index) const {
  check_index(group_, index);
  Complex v = rule_(index);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NumericalFailure("symbol " + label_ + " is not finite at " + to_string(index));
  return v;
}

MultiplierSymbol MultiplierSymbol::product(const MultiplierSymbol& a, const MultiplierSymbol& b) {
  if (a.group() != b.group()) throw InvalidArgument("symbols belong to different groups");
  return MultiplierSymbol(
      a.group(), [a, b](const DualIndex& i) { return a(i) * b(i); }, a.label() + "*" + b.label());
}

MultiplierSymbol oscillating_symbol(const GroupId& group, double theta) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw InvalidArgument("theta must lie in the range [0,1), got " + num(theta));
  const double s = group.dimension() * theta / 2.0;
  return MultiplierSymbol(
      group,
      [group, theta, s](const DualIndex& i) {
        const double w = weight_of(group, i);
        return std::pow(w, -s) * std::polar(1.0, std::pow(w, theta));
      },
      "oscillating(theta=" + num(theta) + ")");
}

MultiplierSymbol bessel_symbol(const GroupId& group, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("Bessel order must be nonnegative, got " + num(s));
  return MultiplierSymbol(
      group, [group, s](const DualIndex& i) { return Complex(std::pow(weight_of(group, i), -s)); },
      "bessel(s=" + num(s) + ")");
}

MultiplierSymbol pure_oscillation_symbol(const GroupId& group, double theta) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw InvalidArgument("theta must lie in the range [0,1), got " + num(theta));
  return MultiplierSymbol(
      group, [group, theta](const DualIndex& i) { return std::polar(1.0, std::pow(weight_of(group, i), theta)); },
      "pure_oscillation(theta=" + num(theta) + ")");
}

MultiplierSymbol heat_symbol(const GroupId& group, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("heat time must be nonnegative, got " + num(t));
  return MultiplierSymbol(
      group, [group, t](const DualIndex& i) { return Complex(std::exp(-t * spectral_data(group, i).eigenvalue)); },
      "heat(t=" + num(t) + ")");
}

MultiplierSymbol identity_symbol(const GroupId& group) {
  return MultiplierSymbol(group, [](const DualIndex&) { return Complex(1.0); }, "identity");
}

MultiplierSymbol zero_symbol(const GroupId& group) {
  return MultiplierSymbol(group, [](const DualIndex&) { return Complex(0.0); }, "zero");
}

MultiplierSymbol indicator_symbol(const GroupId& group, const DualIndex& index) {
  check_index(group, index);
  return MultiplierSymbol(
      group, [index](const DualIndex& i) { return Complex(i == index ? 1.0 : 0.0); },
      "indicator(" + to_string(index) + ")");
}

GridFunction apply_multiplier(const MultiplierSymbol& symbol, const GridFunction& f, double bandwidth) {
  if (symbol.group() != f.grid_ref().group()) throw InvalidArgument("symbol and function belong to different groups");
  auto c = forward_transform(f, bandwidth);
  for (std::size_t i = 0; i < c.size(); ++i) c.block(i) *= symbol(c.index(i));
  return inverse_transform(c, f.grid());
}

Regularization Regularization::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("regularization sigma must be positive");
  return {Kind::Gaussian, sigma};
}

double Regularization::damping(double eigenvalue) const {
  if (kind == Kind::None) return 1.0;
  return std::exp(-eigenvalue / (sigma * sigma));
}

KernelSynthesis synthesize_kernel(const MultiplierSymbol& symbol, GridPtr grid, double bandwidth,
                                  Regularization regularization) {
  if (symbol.group() != grid->group()) throw InvalidArgument("symbol and grid belong to different groups");
  if (!grid->supports_bandwidth(bandwidth))
    throw ResolutionError("grid B=" + std::to_string(grid->resolution()) + " cannot resolve bandwidth " +
                          num(bandwidth) + " for kernel synthesis");
  auto c = FourierCoefficients::zeros(symbol.group(), bandwidth);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto sd = spectral_data(c.group(), c.index(i));
    const Complex v = symbol(c.index(i)) * regularization.damping(sd.eigenvalue);
    c.block(i) = v * Matrix::Identity(sd.dim, sd.dim);
  }
  GridFunction k = inverse_transform(c, grid);
  return {std::move(k), std::move(c), bandwidth, regularization, symbol.label()};
}

DecayReport verify_decay(const MultiplierSymbol& symbol, double theta, double bandwidth) {
  const GroupId& g = symbol.group();
  const double s = g.dimension() * theta / 2.0;
  const auto indices = enumerate_dual(g, bandwidth);
  std::vector<std::pair<double, double>> scaled;  // (weight, |rule| <xi>^s)
  scaled.reserve(indices.size());
  for (const auto& i : indices) {
    const double w = weight_of(g, i);
    scaled.emplace_back(w, std::abs(symbol(i)) * std::pow(w, s));
  }
  DecayReport r;
  std::vector<double> levels;
  for (double l = bandwidth; l >= 1.0; l /= 2.0) levels.push_back(l);
  std::reverse(levels.begin(), levels.end());
  for (double l : levels) {
    double c = 0.0;
    for (const auto& [w, v] : scaled)
      if (w <= l) c = std::max(c, v);
    r.levels.push_back({l, c});
  }
  r.constant = r.levels.back().constant;
  r.admissible = true;
  for (std::size_t k = 1; k < r.levels.size(); ++k)
    if (r.levels[k].constant > r.levels[k - 1].constant * (1.0 + kDecayGrowthTolerance)) r.admissible = false;
  return r;
}

EnvelopeFit envelope_fit(const KernelSynthesis& kernel, RadialWindow window, int bins) {
  const auto& g = kernel.kernel.grid_ref();
  if (!(window.lo > 0.0 && window.hi > window.lo && window.hi <= g.group().diameter()))
    throw InvalidArgument("envelope window must satisfy 0 < lo < hi <= diameter");
  if (bins < kEnvelopeMinBins) throw InvalidArgument("envelope fit needs at least 8 bins");
  const double llo = std::log(window.lo), lhi = std::log(window.hi);
  std::vector<double> best(bins, -1.0);
  const auto& norms = g.norms();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = norms[i];
    if (d < window.lo || d > window.hi) continue;
    int b = static_cast<int>((std::log(d) - llo) / (lhi - llo) * bins);
    b = std::clamp(b, 0, bins - 1);
    best[b] = std::max(best[b], std::abs(kernel.kernel[i]));
  }
  EnvelopeFit fit;
  for (int b = 0; b < bins; ++b) {
    if (best[b] <= 0.0) continue;
    fit.bins.push_back({std::exp(llo + (b + 0.5) * (lhi - llo) / bins), best[b]});
  }
  if (static_cast<int>(fit.bins.size()) < kEnvelopeMinBins)
    throw InvalidArgument("envelope window holds " + std::to_string(fit.bins.size()) +
                          " nonempty bins, fewer than 8; widen the window or refine the grid");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.bins.size());
  for (const auto& b : fit.bins) {
    const double x = std::log(b.center), y = std::log(b.max_abs);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

double envelope_slope(const KernelSynthesis& kernel, RadialWindow window) {
  return envelope_fit(kernel, window, kEnvelopeBins).slope;
}

std::string kernel_csv(const GridFunction& kernel) {
  const auto& norms = kernel.grid_ref().norms();
  std::vector<std::size_t> order(kernel.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
  std::ostringstream out;
  out << "distance,re,im,abs\n";
  char buf[128];
  for (std::size_t i : order) {
    const Complex v = kernel[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", norms[i], v.real(), v.imag(), std::abs(v));
    out << buf;
  }
  return out.str();
}

}  // namespace lieosc

#include "lieosc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "lieosc/errors.hpp"

namespace lieosc {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::pair<double, double>> distribution_function(const GridFunction& u,
                                                             std::span<const double> alpha_grid) {
  if (alpha_grid.empty()) throw InvalidArgument("alpha grid must be nonempty");
  for (std::size_t k = 1; k < alpha_grid.size(); ++k)
    if (!(alpha_grid[k] >= alpha_grid[k - 1])) throw InvalidArgument("alpha grid must be sorted ascending");
  const auto& g = u.grid_ref();
  std::vector<double> mags(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) mags[i] = std::abs(u[i]);
  std::vector<std::pair<double, double>> out;
  out.reserve(alpha_grid.size());
  std::vector<double> sel(u.size());
  for (double a : alpha_grid) {
    for (std::size_t i = 0; i < u.size(); ++i) sel[i] = mags[i] > a ? g.weight(i) : 0.0;
    out.emplace_back(a, pairwise_sum(sel));
  }
  return out;
}

std::vector<double> weak_alpha_grid(double sup_norm) {
  if (!(sup_norm > 0.0)) throw InvalidArgument("alpha grid needs a positive sup norm");
  return log_spaced(sup_norm * 1e-4, sup_norm, kAlphaGridSize);
}

GridFunction approximate_identity(GridPtr grid, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (epsilon < 2.0 * grid->spacing())
    throw ResolutionError("ball of radius " + std::to_string(epsilon) + " is under-resolved by grid B=" +
                          std::to_string(grid->resolution()));
  const double inv = 1.0 / ball_volume(grid->group(), epsilon);
  const auto& norms = grid->norms();
  std::vector<Complex> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = norms[i] < epsilon ? inv : 0.0;
  return GridFunction(std::move(grid), std::move(v));
}

namespace {

GroupPoint random_point(const GroupId& group, std::mt19937_64& rng) {
  if (group.is_su2()) {
    std::normal_distribution<double> n01;
    double a = n01(rng), b = n01(rng), c = n01(rng), d = n01(rng);
    return GroupPoint::su2(a, b, c, d);
  }
  std::uniform_real_distribution<double> u01;
  std::vector<double> c(group.dimension());
  for (double& x : c) x = u01(rng);
  return GroupPoint::torus(std::move(c));
}

// Mean-zero atom on B(c, eps): the inner ball B(c, eps/2) minus its average over B(c, eps),
// normalized in L1.
GridFunction cancellative_atom(GridPtr grid, const GroupPoint& c, double eps) {
  if (eps < 2.0 * grid->spacing())
    throw ResolutionError("atom radius " + std::to_string(eps) + " is under-resolved by grid B=" +
                          std::to_string(grid->resolution()));
  std::vector<double> d(grid->size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = distance(grid->point(i), c);
  std::vector<double> inner(grid->size()), outer(grid->size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    outer[i] = d[i] < eps ? grid->weight(i) : 0.0;
    inner[i] = d[i] < 0.5 * eps ? grid->weight(i) : 0.0;
  }
  const double mi = pairwise_sum(inner), mo = pairwise_sum(outer);
  if (mi <= 0.0 || mi >= mo) throw ResolutionError("atom of radius " + std::to_string(eps) + " has no cancellation on the grid");
  std::vector<Complex> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (d[i] >= eps) continue;
    v[i] = (d[i] < 0.5 * eps ? 1.0 : 0.0) - mi / mo;
  }
  GridFunction f(grid, std::move(v));
  f *= 1.0 / f.l1_norm();
  return f;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Weak11Report weak11_sweep(const MultiplierSymbol& symbol, const TestFamily& family, double bandwidth, GridPtr grid) {
  if (family.epsilons.empty()) throw InvalidArgument("test family needs at least one epsilon");
  for (double e : family.epsilons)
    if (!(e > 0.0)) throw InvalidArgument("test family radii must be positive");
  if (family.kind == TestFamily::Kind::Atoms && family.atoms_per_radius < 1)
    throw InvalidArgument("atoms_per_radius must be at least 1");
  if (!grid->supports_bandwidth(bandwidth))
    throw ResolutionError("grid B=" + std::to_string(grid->resolution()) + " cannot resolve bandwidth " +
                          fmt_g(bandwidth));

  Weak11Report report;
  std::mt19937_64 rng(family.seed);
  auto run_row = [&](Weak11Row row, const std::function<GridFunction()>& make) {
    row.alpha_grid_size = kAlphaGridSize;
    try {
      const GridFunction f = make();
      row.l1_norm = f.l1_norm();
      const GridFunction tf = apply_multiplier(symbol, f, bandwidth);
      const double top = tf.sup_norm();
      if (top > 0.0) {
        const auto alphas = weak_alpha_grid(top);
        for (const auto& [a, m] : distribution_function(tf, alphas)) row.sup_level = std::max(row.sup_level, a * m);
      }
      row.ratio = row.sup_level / row.l1_norm;
    } catch (const ResolutionError& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  };

  for (std::size_t k = 0; k < family.epsilons.size(); ++k) {
    const double eps = family.epsilons[k];
    if (family.kind == TestFamily::Kind::ApproximateIdentity) {
      char id[32];
      std::snprintf(id, sizeof id, "ai_%02zu", k);
      run_row({id, eps}, [&] { return approximate_identity(grid, eps); });
    } else {
      for (int a = 0; a < family.atoms_per_radius; ++a) {
        const GroupPoint c = random_point(grid->group(), rng);
        char id[32];
        std::snprintf(id, sizeof id, "atom_%02zu_%02d", k, a);
        run_row({id, eps}, [&] { return cancellative_atom(grid, c, eps); });
      }
    }
  }
  return report;
}

Weak11Report weak11_sweep(const GroupId& group, double theta, const TestFamily& family, double bandwidth,
                          int resolution) {
  return weak11_sweep(oscillating_symbol(group, theta), family, bandwidth, build_grid(group, resolution));
}

std::string weak11_csv(const Weak11Report& report) {
  std::string out = "id,epsilon,l1_norm,sup_alpha_level,ratio\n";
  for (const auto& r : report.rows) {
    if (r.error) continue;
    out += r.id + "," + fmt_g(r.epsilon) + "," + fmt_g(r.l1_norm) + "," + fmt_g(r.sup_level) + "," + fmt_g(r.ratio) +
           "\n";
  }
  return out;
}

// ---- configuration ----

namespace {

const std::set<std::string> kKinds{"plancherel", "multiplier", "kernel", "seminorm", "czd", "weak11"};
const std::set<std::string> kTopLevel{"schema", "kind", "group", "theta", "bandwidth", "grid_resolution", "seed",
                                      "params"};

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" (after the optional parent key), 0 when absent.
int line_of_key(const std::string& text, const std::string& key, const std::string& parent = "") {
  std::size_t from = 0;
  if (!parent.empty()) {
    from = text.find("\"" + parent + "\"");
    if (from == std::string::npos) from = 0;
  }
  const std::size_t pos = text.find("\"" + key + "\"", from);
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

[[noreturn]] void field_error(const std::string& text, const std::string& key, const std::string& msg,
                              const std::string& parent = "") {
  const int line = line_of_key(text, key, parent);
  const std::string where = parent.empty() ? key : parent + "." + key;
  throw InvalidArgument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "field '" + where +
                        "' " + msg);
}

// Typed access into the params block with located error messages.
class Params {
 public:
  Params(const ExperimentConfig& c) : c_(c) {}

  bool has(const std::string& k) const { return c_.params.contains(k); }

  double number(const std::string& k, std::optional<double> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      field_error(c_.source, k, "is required", "params");
    }
    const auto& v = c_.params.at(k);
    if (!v.is_number()) field_error(c_.source, k, "must be a number", "params");
    const double d = v.get<double>();
    if (!std::isfinite(d)) field_error(c_.source, k, "must be finite", "params");
    return d;
  }

  double positive(const std::string& k, std::optional<double> def = std::nullopt) const {
    const double d = number(k, def);
    if (!(d > 0.0)) field_error(c_.source, k, "must be positive, got " + fmt_g(d), "params");
    return d;
  }

  int integer(const std::string& k, int lo, std::optional<int> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      field_error(c_.source, k, "is required", "params");
    }
    const auto& v = c_.params.at(k);
    if (!v.is_number_integer()) field_error(c_.source, k, "must be an integer", "params");
    const long long i = v.get<long long>();
    if (i < lo || i > 1000000) field_error(c_.source, k, "must be an integer >= " + std::to_string(lo), "params");
    return static_cast<int>(i);
  }

  std::string text(const std::string& k, const std::string& def, const std::set<std::string>& allowed) const {
    if (!has(k)) return def;
    const auto& v = c_.params.at(k);
    if (!v.is_string()) field_error(c_.source, k, "must be a string", "params");
    std::string s = v.get<std::string>();
    if (!allowed.count(s)) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      field_error(c_.source, k, "must be one of {" + opts + "}, got '" + s + "'", "params");
    }
    return s;
  }

  std::vector<double> positive_list(const std::string& k) const {
    if (!has(k)) field_error(c_.source, k, "is required", "params");
    const auto& v = c_.params.at(k);
    if (!v.is_array() || v.empty()) field_error(c_.source, k, "must be a nonempty array of numbers", "params");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !(e.get<double>() > 0.0))
        field_error(c_.source, k, "must contain positive numbers only", "params");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json& object(const std::string& k) const {
    if (!has(k)) field_error(c_.source, k, "is required", "params");
    const auto& v = c_.params.at(k);
    if (!v.is_object()) field_error(c_.source, k, "must be an object", "params");
    return v;
  }

 private:
  const ExperimentConfig& c_;
};

MultiplierSymbol symbol_from(const ExperimentConfig& c, const Params& p) {
  const std::string kind =
      p.text("symbol", "oscillating", {"oscillating", "bessel", "pure_oscillation", "heat", "identity", "zero"});
  const GroupId& g = c.group;
  if (kind == "oscillating") return oscillating_symbol(g, c.theta);
  if (kind == "bessel") return bessel_symbol(g, p.number("s", g.dimension() * c.theta / 2.0));
  if (kind == "pure_oscillation") return pure_oscillation_symbol(g, c.theta);
  if (kind == "heat") return heat_symbol(g, p.positive("t"));
  if (kind == "identity") return identity_symbol(g);
  return zero_symbol(g);
}

Regularization regularization_from(const ExperimentConfig& c, const Params& p, const std::string& def) {
  const std::string kind = p.text("regularization", def, {"none", "gaussian"});
  if (kind == "none") return Regularization::none();
  return Regularization::gaussian(p.positive("sigma", c.bandwidth));
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const std::string& what) {
  if (!seed) throw InvalidArgument("field 'seed' is mandatory for " + what + " (set it in the config or pass --seed)");
  return *seed;
}

FourierCoefficients random_coefficients(const GroupId& g, double bandwidth, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  auto c = FourierCoefficients::zeros(g, bandwidth);
  for (std::size_t i = 0; i < c.size(); ++i) {
    Matrix& b = c.block(i);
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index k = 0; k < b.cols(); ++k) {
        const double re = n01(rng);
        const double im = n01(rng);
        b(r, k) = {re, im};
      }
  }
  return c;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  bool failed = false;  // keeps the ".partial" suffix and reports a numerical failure
  std::string failure;
  std::vector<std::string> warnings;
};

Artifacts run_plancherel(const ExperimentConfig& c, const Params& p, const std::optional<std::uint64_t>& seed) {
  const int samples = p.integer("samples", 1, 10);
  std::mt19937_64 rng(require_seed(seed, "plancherel runs"));
  const GridPtr grid = build_grid(c.group, c.resolution);
  if (!grid->supports_bandwidth(c.bandwidth))
    throw ResolutionError("grid B=" + std::to_string(c.resolution) + " cannot resolve bandwidth " + fmt_g(c.bandwidth));
  std::string csv = "sample,roundtrip_rel_error,plancherel_rel_error\n";
  double worst_rt = 0.0, worst_pl = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto coeffs = random_coefficients(c.group, c.bandwidth, rng);
    const GridFunction f = inverse_transform(coeffs, grid);
    const auto back = forward_transform(f, c.bandwidth);
    const GridFunction f2 = inverse_transform(back, grid);
    const double rt = (f2 - f).sup_norm() / f.sup_norm();
    const double l2 = f.l2_norm_squared();
    const double pl = std::abs(l2 - plancherel_energy(back)) / l2;
    worst_rt = std::max(worst_rt, rt);
    worst_pl = std::max(worst_pl, pl);
    csv += std::to_string(s) + "," + fmt_g(rt) + "," + fmt_g(pl) + "\n";
  }
  const bool ok = worst_rt <= 1e-8 && worst_pl <= 1e-8;
  json summary{{"group", c.group.name()},
               {"bandwidth", c.bandwidth},
               {"grid_resolution", c.resolution},
               {"samples", samples},
               {"max_roundtrip_rel_error", worst_rt},
               {"max_plancherel_rel_error", worst_pl},
               {"tolerance", 1e-8},
               {"passed", ok}};
  Artifacts a{{{"plancherel.csv", csv}, {"plancherel.json", dump(summary)}}};
  if (!ok) {
    a.failed = true;
    a.failure = "Plancherel/inversion identity error exceeds 1e-8";
  }
  return a;
}

GridFunction input_function(const ExperimentConfig& c, const Params& p, const GridPtr& grid,
                            const std::optional<std::uint64_t>& seed) {
  if (!p.has("input")) return approximate_identity(grid, 0.25 * c.group.diameter());
  const json& in = p.object("input");
  const std::string type = in.value("type", "");
  if (type == "approximate_identity") {
    if (!in.contains("epsilon") || !in["epsilon"].is_number() || !(in["epsilon"].get<double>() > 0.0))
      field_error(c.source, "epsilon", "must be a positive number", "input");
    return approximate_identity(grid, in["epsilon"].get<double>());
  }
  if (type == "random") {
    std::mt19937_64 rng(require_seed(seed, "random inputs"));
    return inverse_transform(random_coefficients(c.group, c.bandwidth, rng), grid);
  }
  field_error(c.source, "type", "must be 'approximate_identity' or 'random'", "input");
}

Artifacts run_multiplier(const ExperimentConfig& c, const Params& p, const std::optional<std::uint64_t>& seed) {
  const MultiplierSymbol sym = symbol_from(c, p);
  const GridPtr grid = build_grid(c.group, c.resolution);
  const GridFunction f = input_function(c, p, grid, seed);
  const GridFunction tf = apply_multiplier(sym, f, c.bandwidth);
  const DecayReport decay = verify_decay(sym, c.theta, c.bandwidth);
  std::string csv = "distance,re_in,im_in,re_out,im_out\n";
  std::vector<std::size_t> order(grid->size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid->norms()[a] < grid->norms()[b]; });
  for (std::size_t i : order)
    csv += fmt_g(grid->norms()[i]) + "," + fmt_g(f[i].real()) + "," + fmt_g(f[i].imag()) + "," +
           fmt_g(tf[i].real()) + "," + fmt_g(tf[i].imag()) + "\n";
  std::string decay_csv = "bandwidth,constant\n";
  for (const auto& l : decay.levels) decay_csv += fmt_g(l.bandwidth) + "," + fmt_g(l.constant) + "\n";
  json summary{{"symbol", sym.label()},
               {"bandwidth", c.bandwidth},
               {"decay_constant", decay.constant},
               {"decay_admissible", decay.admissible},
               {"input_l1", f.l1_norm()},
               {"input_l2", std::sqrt(f.l2_norm_squared())},
               {"output_l2", std::sqrt(tf.l2_norm_squared())},
               {"output_sup", tf.sup_norm()}};
  return {{{"multiplier.csv", csv}, {"decay.csv", decay_csv}, {"multiplier.json", dump(summary)}}};
}

Artifacts run_kernel(const ExperimentConfig& c, const Params& p) {
  const MultiplierSymbol sym = symbol_from(c, p);
  const Regularization reg = regularization_from(c, p, "gaussian");
  const GridPtr grid = build_grid(c.group, c.resolution);
  const KernelSynthesis k = synthesize_kernel(sym, grid, c.bandwidth, reg);
  json summary{{"symbol", k.label},
               {"bandwidth", c.bandwidth},
               {"regularization", reg.kind == Regularization::Kind::None ? "none" : "gaussian"},
               {"sigma", reg.sigma},
               {"integral", complex_json(k.kernel.integral())}};
  if (p.has("window")) {
    const auto w = p.positive_list("window");
    if (w.size() != 2) field_error(c.source, "window", "must be [lo, hi]", "params");
    const EnvelopeFit fit = envelope_fit(k, {w[0], w[1]});
    json bins = json::array();
    for (const auto& b : fit.bins) bins.push_back({b.center, b.max_abs});
    summary["envelope"] = {{"window", w}, {"slope", fit.slope}, {"intercept", fit.intercept}, {"bins", bins}};
  }
  return {{{"kernel.csv", kernel_csv(k.kernel)}, {"kernel.json", dump(summary)}}};
}

Artifacts run_seminorm(const ExperimentConfig& c, const Params& p, const std::optional<std::uint64_t>& seed) {
  const std::uint64_t s = require_seed(seed, "seminorm designs");
  const MultiplierSymbol sym = symbol_from(c, p);
  const Regularization reg = regularization_from(c, p, "none");
  const int ys = p.integer("y_samples", 1, 8);
  std::vector<double> radii;
  {
    const json& r = p.object("r_grid");
    const double lo = r.value("lo", 0.0), hi = r.value("hi", 0.0);
    const int n = r.value("count", 0);
    if (!(lo > 0.0 && hi >= lo && n >= 1)) field_error(c.source, "r_grid", "needs 0 < lo <= hi and count >= 1", "params");
    radii = log_spaced(lo, hi, n);
  }
  Artifacts a;
  if (c.group.is_su2())
    a.warnings.push_back("SU(2) seminorm runs are expensive: " + std::to_string(radii.size() * (ys + 6)) +
                         " translated kernels on the full grid");
  const GridPtr grid = build_grid(c.group, c.resolution);
  const KernelSynthesis k = synthesize_kernel(sym, grid, c.bandwidth, reg);
  const SeminormEstimate est = estimate_seminorm(BandLimitedKernel::from_synthesis(k), c.theta, radii, ys, s);
  double qerr = 0.0;
  for (const auto& r : est.per_r) qerr = std::max(qerr, r.quadrature_error);
  json summary{{"symbol", k.label},
               {"bandwidth", c.bandwidth},
               {"theta", c.theta},
               {"value", est.value},
               {"y_samples", ys},
               {"seed", s},
               {"max_quadrature_error", qerr},
               {"lower_bound", true}};
  a.files = {{"seminorm.csv", seminorm_csv(est)}, {"seminorm.json", dump(summary)}};
  return a;
}

GridFunction czd_function(const ExperimentConfig& c, const Params& p, const GridPtr& grid,
                          const std::optional<std::uint64_t>& seed) {
  const json& fn = p.object("function");
  const std::string type = fn.value("type", "");
  if (type == "indicator") {
    if (!c.group.is_torus()) field_error(c.source, "type", "'indicator' boxes need a torus group", "function");
    const std::size_t n = static_cast<std::size_t>(c.group.dimension());
    auto corner = [&](const char* key) {
      const auto it = fn.find(key);
      bool ok = it != fn.end() && it->is_array() && it->size() == n;
      if (ok)
        for (const auto& v : *it) ok = ok && v.is_number();
      if (!ok) field_error(c.source, key, "must be an array of " + std::to_string(n) + " numbers", "function");
      return it->get<std::vector<double>>();
    };
    const auto lo = corner("lo");
    const auto hi = corner("hi");
    const auto hv = fn.find("height");
    if (hv != fn.end() && !hv->is_number()) field_error(c.source, "height", "must be a number", "function");
    const double h = hv != fn.end() ? hv->get<double>() : 1.0;
    return GridFunction::from(grid, [&](const GroupPoint& x) {
      const auto& xc = x.as_torus().coords;
      for (std::size_t k = 0; k < n; ++k)
        if (!(xc[k] >= lo[k] && xc[k] < hi[k])) return Complex(0.0);
      return Complex(h);
    });
  }
  if (type == "ball") {
    const double r = fn.value("radius", 0.0), h = fn.value("height", 1.0);
    if (!(r > 0.0)) field_error(c.source, "radius", "must be positive", "function");
    return GridFunction::from(grid, [&](const GroupPoint& x) { return Complex(geodesic_norm(x) < r ? h : 0.0); });
  }
  if (type == "random") {
    std::mt19937_64 rng(require_seed(seed, "random CZ inputs"));
    std::exponential_distribution<double> e(1.0);
    std::vector<Complex> v(grid->size());
    for (auto& x : v) {
      const double a = e(rng);
      x = a * a * a;  // heavy-tailed so that several altitudes select cells
    }
    return GridFunction(grid, std::move(v));
  }
  field_error(c.source, "type", "must be 'indicator', 'ball' or 'random'", "function");
}

Artifacts run_czd(const ExperimentConfig& c, const Params& p, const std::optional<std::uint64_t>& seed) {
  const GridPtr grid = build_grid(c.group, c.resolution);
  const GridFunction f = czd_function(c, p, grid, seed);
  const auto altitudes = p.positive_list("altitudes");
  const int depth = p.integer("depth", 1, max_dyadic_depth(*grid));
  const DyadicSystem sys = build_dyadic_system(grid, depth);
  const std::string smoothing = p.text("smoothing", "none", {"none", "fourier", "direct"});

  Artifacts a;
  json runs = json::array();
  std::string csv = "altitude,level,cell,diameter,measure,bad_l1\n";
  for (double alt : altitudes) {
    const CzDecomposition d = decompose(f, alt, sys);
    const CzReport report = verify_properties(d, f);
    json s = cz_summary_json(d, report);
    if (smoothing != "none") {
      const auto sb = smooth_bad_part(d, c.theta, grid, c.bandwidth,
                                      smoothing == "fourier" ? SmoothingMode::Fourier : SmoothingMode::Direct);
      json pieces = json::array();
      for (std::size_t j = 0; j < sb.pieces.size(); ++j)
        pieces.push_back({{"radius", sb.radii[j]},
                          {"integral", complex_json(sb.pieces[j].integral())},
                          {"l1", sb.pieces[j].l1_norm()}});
      s["smoothed"] = {{"mode", smoothing}, {"l1", sb.total.l1_norm()}, {"pieces", pieces}};
    }
    runs.push_back(std::move(s));
    for (const auto& b : d.bad)
      csv += fmt_g(alt) + "," + std::to_string(b.level) + "," + std::to_string(b.cell) + "," + fmt_g(b.diameter) + "," +
             fmt_g(b.measure) + "," + fmt_g(b.l1_norm(*grid)) + "\n";
    if (!report.all_passed() && !a.failed) {
      a.failed = true;
      try {
        report.require_all();
      } catch (const NumericalFailure& e) {
        a.failure = e.what();
      }
    }
  }
  json summary{{"group", c.group.name()},
               {"grid_resolution", c.resolution},
               {"depth", depth},
               {"f_l1", f.l1_norm()},
               {"decompositions", runs}};
  a.files = {{"czd.csv", csv}, {"czd.json", dump(summary)}};
  return a;
}

Artifacts run_weak11(const ExperimentConfig& c, const Params& p, const std::optional<std::uint64_t>& seed) {
  TestFamily fam;
  const std::string kind = p.text("family", "approximate_identity", {"approximate_identity", "atoms"});
  fam.kind = kind == "atoms" ? TestFamily::Kind::Atoms : TestFamily::Kind::ApproximateIdentity;
  fam.epsilons = p.positive_list("epsilons");
  if (fam.kind == TestFamily::Kind::Atoms) {
    fam.atoms_per_radius = p.integer("atoms_per_radius", 1, 1);
    fam.seed = require_seed(seed, "random atoms");
  }
  const MultiplierSymbol sym = symbol_from(c, p);
  const Weak11Report r = weak11_sweep(sym, fam, c.bandwidth, build_grid(c.group, c.resolution));
  json rows = json::array(), errors = json::array();
  for (const auto& row : r.rows) {
    if (row.error) {
      errors.push_back({{"id", row.id}, {"epsilon", row.epsilon}, {"error", *row.error}});
      continue;
    }
    rows.push_back({{"id", row.id},
                    {"epsilon", row.epsilon},
                    {"l1_norm", row.l1_norm},
                    {"sup_alpha_level", row.sup_level},
                    {"ratio", row.ratio},
                    {"alpha_grid_size", row.alpha_grid_size}});
  }
  json summary{{"symbol", sym.label()}, {"bandwidth", c.bandwidth}, {"rows", rows}, {"errors", errors}};
  return {{{"weak11.csv", weak11_csv(r)}, {"weak11.json", dump(summary)}}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  c.source = text;
  try {
    c.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("line " + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                          ": malformed JSON (" + e.what() + ")");
  }
  const json& j = c.raw;
  if (!j.is_object()) throw InvalidArgument("line 1: config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!kTopLevel.count(k)) field_error(text, k, "is not part of schema version 1");

  if (!j.contains("schema")) field_error(text, "schema", "is required (use 1)");
  if (!j["schema"].is_number_integer() || j["schema"].get<long long>() != kConfigSchemaVersion)
    field_error(text, "schema", "must be 1");

  if (!j.contains("kind") || !j["kind"].is_string()) field_error(text, "kind", "is required and must be a string");
  c.kind = j["kind"].get<std::string>();
  if (!kKinds.count(c.kind))
    field_error(text, "kind", "must be one of plancherel, multiplier, kernel, seminorm, czd, weak11; got '" + c.kind + "'");

  if (!j.contains("group") || !j["group"].is_string()) field_error(text, "group", "is required and must be a string");
  try {
    c.group = GroupId::parse(j["group"].get<std::string>());
  } catch (const InvalidArgument& e) {
    field_error(text, "group", e.what());
  }

  if (j.contains("theta")) {
    if (!j["theta"].is_number()) field_error(text, "theta", "must be a number");
    c.theta = j["theta"].get<double>();
    if (!(c.theta >= 0.0 && c.theta < 1.0))
      field_error(text, "theta", "must lie in the valid range [0,1), got " + fmt_g(c.theta));
  }

  if (!j.contains("bandwidth") || !j["bandwidth"].is_number()) field_error(text, "bandwidth", "is required and must be a number");
  c.bandwidth = j["bandwidth"].get<double>();
  if (!(c.bandwidth >= 1.0) || !std::isfinite(c.bandwidth))
    field_error(text, "bandwidth", "must be at least 1, got " + fmt_g(c.bandwidth));

  if (!j.contains("grid_resolution") || !j["grid_resolution"].is_number_integer())
    field_error(text, "grid_resolution", "is required and must be an integer");
  const long long b = j["grid_resolution"].get<long long>();
  if (b < 2 || b > 1 << 16) field_error(text, "grid_resolution", "must lie in [2, 65536], got " + std::to_string(b));
  c.resolution = static_cast<int>(b);

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) field_error(text, "seed", "must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }

  c.params = j.value("params", json::object());
  if (!c.params.is_object()) field_error(text, "params", "must be an object");
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

RunResult run_config(const ExperimentConfig& config, const fs::path& out_dir,
                     std::optional<std::uint64_t> seed_override) {
  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  const std::optional<std::uint64_t> seed = seed_override ? seed_override : config.seed;
  Artifacts art;
  try {
    const Params p(config);
    if (config.kind == "plancherel") art = run_plancherel(config, p, seed);
    else if (config.kind == "multiplier") art = run_multiplier(config, p, seed);
    else if (config.kind == "kernel") art = run_kernel(config, p);
    else if (config.kind == "seminorm") art = run_seminorm(config, p, seed);
    else if (config.kind == "czd") art = run_czd(config, p, seed);
    else art = run_weak11(config, p, seed);
  } catch (const InvalidArgument& e) {
    return {ExitCode::Validation, e.what(), {}, {}};
  } catch (const ResolutionError& e) {
    return {ExitCode::Resolution, e.what(), {}, {}};
  } catch (const NumericalFailure& e) {
    return {ExitCode::Numerical, e.what(), {}, {}};
  } catch (const json::exception& e) {
    // A params field of the wrong JSON type that no validator caught.
    return {ExitCode::Validation, std::string("invalid params: ") + e.what(), {}, {}};
  }
  result.warnings = art.warnings;

  fs::create_directories(out_dir);
  std::vector<std::string> names;
  for (const auto& [name, content] : art.files) {
    write_file(out_dir / (name + ".partial"), content);
    names.push_back(name);
  }
  if (art.failed) {
    for (const auto& n : names) result.artifacts.push_back(out_dir / (n + ".partial"));
    result.code = ExitCode::Numerical;
    result.message = art.failure;
    return result;
  }
  for (const auto& n : names) {
    fs::rename(out_dir / (n + ".partial"), out_dir / n);
    result.artifacts.push_back(out_dir / n);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest{{"library_version", kLibraryVersion},
                {"schema", kConfigSchemaVersion},
                {"kind", config.kind},
                {"seed", seed ? json(*seed) : json(nullptr)},
                {"config", config.raw},
                {"artifacts", names},
                {"wall_time_seconds", wall}};
  write_file(out_dir / "manifest.json.partial", dump(manifest));
  fs::rename(out_dir / "manifest.json.partial", out_dir / "manifest.json");
  result.artifacts.push_back(out_dir / "manifest.json");
  result.message = "ok";
  return result;
}

RunResult run_config_file(const fs::path& config_path, const fs::path& out_dir,
                          std::optional<std::uint64_t> seed_override, const std::string& expected_kind) {
  ExperimentConfig c;
  try {
    c = ExperimentConfig::load(config_path);
  } catch (const InvalidArgument& e) {
    return {ExitCode::Validation, e.what(), {}, {}};
  }
  if (!expected_kind.empty() && c.kind != expected_kind)
    return {ExitCode::Validation,
            "line " + std::to_string(line_of_key(c.source, "kind")) + ": config kind '" + c.kind +
                "' does not match subcommand '" + expected_kind + "'",
            {},
            {}};
  return run_config(c, out_dir, seed_override);
}

}  // namespace lieosc

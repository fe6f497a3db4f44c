#include "lieosc/cz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>

#include "lieosc/errors.hpp"

namespace lieosc {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(int v) {
  int k = 0;
  while ((1 << k) < v) ++k;
  return k;
}

double weighted_sum(const QuadratureGrid& g, const std::vector<std::size_t>& members) {
  std::vector<double> w;
  w.reserve(members.size());
  for (std::size_t i : members) w.push_back(g.weight(i));
  return pairwise_sum(w);
}

nlohmann::json point_json(const GroupPoint& p) {
  if (p.is_su2()) {
    const auto& q = p.as_su2().q;
    return std::vector<double>(q.begin(), q.end());
  }
  return p.as_torus().coords;
}

// Fills levels[k] and cell_of_point[k] from a per-level cell-key function; keys are
// dense indices and members come out in ascending grid order.
void assign_level(DyadicSystem& sys, int level, std::size_t cell_count, const std::vector<std::size_t>& key) {
  const auto& g = *sys.grid;
  std::vector<DyadicCell> cells(cell_count);
  std::vector<int> of_point(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    cells[key[i]].members.push_back(i);
    of_point[i] = static_cast<int>(key[i]);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].members.empty())
      throw InvalidArgument("dyadic level " + std::to_string(level) + " has an empty cell; reduce the depth");
    cells[c].measure = weighted_sum(g, cells[c].members);
    cells[c].parent = level == 0 ? -1 : sys.cell_of_point[level - 1][cells[c].members.front()];
  }
  sys.levels.push_back(std::move(cells));
  sys.cell_of_point.push_back(std::move(of_point));
}

void build_torus(DyadicSystem& sys, int depth) {
  const auto& g = *sys.grid;
  const int n = g.group().dimension();
  const int m = 2 * g.resolution();
  for (int k = 0; k <= depth; ++k) {
    const int per_axis = 1 << k;
    const int width = m / per_axis;
    std::size_t count = 1;
    for (int a = 0; a < n; ++a) count *= per_axis;
    std::vector<std::size_t> key(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::size_t r = i, stride = 1, cell = 0;
      for (int a = n - 1; a >= 0; --a) {
        const std::size_t j = r % m;
        r /= m;
        cell += (j / width) * stride;
        stride *= per_axis;
      }
      key[i] = cell;
    }
    assign_level(sys, k, count, key);
    const double side = 1.0 / per_axis;
    for (std::size_t c = 0; c < count; ++c) {
      std::vector<double> center(n);
      std::size_t r = c;
      for (int a = n - 1; a >= 0; --a) {
        center[a] = (static_cast<double>(r % per_axis) + 0.5) * side;
        r /= per_axis;
      }
      auto& cell = sys.levels[k][c];
      cell.center = GroupPoint::torus(center);
      cell.diameter = std::min(std::sqrt(static_cast<double>(n)) * side, g.group().diameter());
    }
  }
}

struct IndexRange {
  int lo = 0, hi = 0;  // [lo, hi)
};

// Splits every range of size > 1 in two, balancing the Gauss-Legendre weight on each side.
std::vector<IndexRange> split_beta(const std::vector<IndexRange>& ranges, const std::vector<double>& w) {
  std::vector<IndexRange> out;
  for (const auto& r : ranges) {
    if (r.hi - r.lo <= 1) {
      out.push_back(r);
      continue;
    }
    double total = 0.0;
    for (int i = r.lo; i < r.hi; ++i) total += w[i];
    int best = r.lo + 1;
    double best_gap = std::numeric_limits<double>::infinity(), left = 0.0;
    for (int s = r.lo + 1; s < r.hi; ++s) {
      left += w[s - 1];
      const double gap = std::abs(2.0 * left - total);
      if (gap < best_gap) {
        best_gap = gap;
        best = s;
      }
    }
    out.push_back({r.lo, best});
    out.push_back({best, r.hi});
  }
  return out;
}

void build_su2(DyadicSystem& sys, int depth) {
  const auto& g = *sys.grid;
  const EulerLayout& e = *g.euler();
  const int na = static_cast<int>(e.alpha.size()), nb = static_cast<int>(e.beta.size()),
            ng = static_cast<int>(e.gamma.size());
  std::vector<IndexRange> beta_ranges{{0, nb}};
  for (int k = 0; k <= depth; ++k) {
    if (k > 0) beta_ranges = split_beta(beta_ranges, e.beta_weights);
    const int sa = std::min(1 << k, na), sg = std::min(1 << k, ng);
    const int wa = na / sa, wg = ng / sg;
    std::vector<int> beta_of(nb);
    for (std::size_t r = 0; r < beta_ranges.size(); ++r)
      for (int ib = beta_ranges[r].lo; ib < beta_ranges[r].hi; ++ib) beta_of[ib] = static_cast<int>(r);
    const std::size_t nbr = beta_ranges.size();
    const std::size_t count = static_cast<std::size_t>(sa) * nbr * sg;
    std::vector<std::size_t> key(g.size());
    for (int ia = 0; ia < na; ++ia)
      for (int ib = 0; ib < nb; ++ib)
        for (int ig = 0; ig < ng; ++ig) {
          const std::size_t i = (static_cast<std::size_t>(ia) * nb + ib) * ng + ig;
          key[i] = (static_cast<std::size_t>(ia / wa) * nbr + beta_of[ib]) * sg + ig / wg;
        }
    assign_level(sys, k, count, key);
    for (std::size_t c = 0; c < count; ++c) {
      const int a_seg = static_cast<int>(c / (nbr * sg));
      const int b_rng = static_cast<int>((c / sg) % nbr);
      const int g_seg = static_cast<int>(c % sg);
      const double alpha = 0.5 * (e.alpha[a_seg * wa] + e.alpha[a_seg * wa + wa - 1]);
      const double beta = 0.5 * (e.beta[beta_ranges[b_rng].lo] + e.beta[beta_ranges[b_rng].hi - 1]);
      const double gamma = 0.5 * (e.gamma[g_seg * wg] + e.gamma[g_seg * wg + wg - 1]);
      auto& cell = sys.levels[k][c];
      cell.center = GroupPoint::su2_from_euler(alpha, beta, gamma);
      double cover = 0.0;
      for (std::size_t i : cell.members) cover = std::max(cover, distance(g.point(i), cell.center));
      const double ball = 2.0 * ball_radius_for_volume(g.group(), std::min(cell.measure, 1.0));
      cell.diameter = std::min(std::max(2.0 * cover, ball), g.group().diameter());
    }
  }
}

}  // namespace

double DyadicSystem::max_refinement_ratio() const {
  double r = 1.0;
  for (std::size_t k = 1; k < levels.size(); ++k)
    for (const auto& c : levels[k]) r = std::max(r, levels[k - 1][c.parent].measure / c.measure);
  return r;
}

int max_dyadic_depth(const QuadratureGrid& grid) {
  const int m = 2 * grid.resolution();
  if (grid.group().is_su2()) {
    if (!is_power_of_two(grid.resolution()))
      throw InvalidArgument("SU(2) dyadic cells need a power-of-two grid resolution");
    return log2_exact(m);
  }
  int k = 0;
  while (m % (1 << (k + 1)) == 0) ++k;
  return k;
}

DyadicSystem build_dyadic_system(GridPtr grid, int depth) {
  if (!grid) throw InvalidArgument("dyadic system needs a grid");
  const int max_depth = max_dyadic_depth(*grid);
  if (depth < 1 || depth > max_depth)
    throw InvalidArgument("dyadic depth must lie in [1, " + std::to_string(max_depth) + "], got " +
                          std::to_string(depth));
  DyadicSystem sys;
  sys.grid = std::move(grid);
  if (sys.grid->group().is_torus()) {
    build_torus(sys, depth);
  } else {
    build_su2(sys, depth);
  }
  return sys;
}

double BadCell::l1_norm(const QuadratureGrid& grid) const {
  std::vector<double> t(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) t[k] = grid.weight(members[k]) * std::abs(values[k]);
  return pairwise_sum(t);
}

Complex BadCell::integral(const QuadratureGrid& grid) const {
  std::vector<double> re(members.size()), im(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    const Complex v = grid.weight(members[k]) * values[k];
    re[k] = v.real();
    im[k] = v.imag();
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

GridFunction BadCell::to_grid_function(GridPtr grid) const {
  auto f = GridFunction::zeros(std::move(grid));
  for (std::size_t k = 0; k < members.size(); ++k) f[members[k]] = values[k];
  return f;
}

GridFunction CzDecomposition::bad_total() const {
  auto total = GridFunction::zeros(good.grid());
  for (const auto& b : bad)
    for (std::size_t k = 0; k < b.members.size(); ++k) total[b.members[k]] += b.values[k];
  return total;
}

CzDecomposition decompose(const GridFunction& f, double altitude, const DyadicSystem& system) {
  if (f.grid() != system.grid) throw InvalidArgument("function and dyadic system use different grids");
  if (!std::isfinite(altitude)) throw InvalidArgument("altitude must be finite");
  const auto& g = f.grid_ref();
  const double mean_abs = f.l1_norm();
  if (!(altitude > mean_abs))
    throw PreconditionViolation("altitude must exceed the mean of |f| over G (" + std::to_string(mean_abs) + ")");

  CzDecomposition d{f, {}, altitude, 1};
  std::vector<char> covered(1, 0);
  for (int k = 1; k <= system.depth(); ++k) {
    const auto& cells = system.levels[k];
    std::vector<char> next(cells.size(), 0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      if (covered[cell.parent]) {
        next[c] = 1;
        continue;
      }
      std::vector<double> a(cell.members.size());
      for (std::size_t t = 0; t < a.size(); ++t) a[t] = g.weight(cell.members[t]) * std::abs(f[cell.members[t]]);
      if (pairwise_sum(a) / cell.measure <= altitude) continue;
      next[c] = 1;
      BadCell b;
      b.level = k;
      b.cell = static_cast<int>(c);
      b.center = cell.center;
      b.diameter = cell.diameter;
      b.measure = cell.measure;
      b.members = cell.members;
      std::vector<double> re(a.size()), im(a.size());
      for (std::size_t t = 0; t < a.size(); ++t) {
        const Complex v = g.weight(cell.members[t]) * f[cell.members[t]];
        re[t] = v.real();
        im[t] = v.imag();
      }
      b.mean = Complex(pairwise_sum(re), pairwise_sum(im)) / cell.measure;
      // f constant on the cell (always so for a single point): take the value itself so b_j is exactly 0.
      const Complex first = f[cell.members.front()];
      if (std::all_of(cell.members.begin(), cell.members.end(), [&](std::size_t i) { return f[i] == first; }))
        b.mean = first;
      b.values.reserve(a.size());
      for (std::size_t i : cell.members) {
        b.values.push_back(f[i] - b.mean);
        d.good[i] = b.mean;
      }
      d.bad.push_back(std::move(b));
    }
    covered = std::move(next);
  }
  return d;
}

bool CzReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck& CzReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InvalidArgument("no property named " + name);
}

void CzReport::require_all() const {
  for (const auto& c : checks) {
    if (c.passed) continue;
    std::string msg = "decomposition property '" + c.name + "' failed: measured " + std::to_string(c.measured) +
                      " > bound " + std::to_string(c.bound);
    if (c.violating_cell) msg += " at bad cell " + std::to_string(*c.violating_cell);
    throw NumericalFailure(msg);
  }
}

CzReport verify_properties(const CzDecomposition& d, const GridFunction& f) {
  const auto& g = f.grid_ref();
  if (d.good.grid() != f.grid()) throw InvalidArgument("decomposition and function use different grids");
  const int n = g.group().dimension();
  const double alt = d.altitude;
  const double f1 = f.l1_norm();
  CzReport r;
  // Bounds are reported as stated; `slack` absorbs summation roundoff in the comparison.
  auto add = [&](std::string name, double measured, double bound, std::optional<int> cell = std::nullopt,
                 double slack = 1e-12) {
    const bool ok = measured <= bound * (1.0 + slack);
    r.checks.push_back({std::move(name), ok, measured, bound, ok ? std::nullopt : cell});
  };

  GridFunction rest = f - d.good - d.bad_total();
  add("reconstruction", rest.sup_norm(), 1e-10 * std::max(1.0, f.sup_norm()), std::nullopt, 0.0);

  double worst_cancel = 0.0, worst_l1 = 0.0, total_measure = 0.0;
  std::optional<int> cancel_cell, l1_cell;
  std::vector<double> l1s;
  std::vector<int> multiplicity(g.size(), 0);
  int overlap = 0;
  for (std::size_t j = 0; j < d.bad.size(); ++j) {
    const auto& b = d.bad[j];
    const double l1 = b.l1_norm(g);
    l1s.push_back(l1);
    const double cancel = l1 > 0.0 ? std::abs(b.integral(g)) / l1 : std::abs(b.integral(g));
    if (cancel > worst_cancel) {
      worst_cancel = cancel;
      cancel_cell = static_cast<int>(j);
    }
    const double rel = l1 / (alt * b.measure);
    if (rel > worst_l1) {
      worst_l1 = rel;
      l1_cell = static_cast<int>(j);
    }
    total_measure += b.measure;
    for (std::size_t i : b.members) overlap = std::max(overlap, ++multiplicity[i]);
  }
  const double scale = std::pow(2.0, n);
  add("cancellation", worst_cancel, 1e-10, cancel_cell, 0.0);
  add("good_sup", d.good.sup_norm(), 2.0 * scale * alt);
  add("good_l1", d.good.l1_norm(), f1);
  add("bad_l1", worst_l1, 4.0 * scale, l1_cell);
  add("total_measure", total_measure, f1 / alt);
  add("bad_total_l1", pairwise_sum(l1s), 2.0 * f1);
  add("overlap", overlap, d.overlap_bound, std::nullopt, 0.0);
  return r;
}

double mollifier_radius(double delta, double theta) {
  if (!(delta > 0.0)) throw InvalidArgument("cell diameter must be positive");
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in the range [0,1)");
  const double e = 1.0 / (1.0 - theta);
  return std::pow(2.0, -e) * std::pow(delta, e);
}

namespace {

int required_resolution(const GroupId& group, double radius) {
  const double need = group.is_su2() ? 4.0 * std::numbers::pi / radius : 1.0 / radius;
  return static_cast<int>(std::ceil(need - 1e-9));
}

bool resolvable(const QuadratureGrid& g, double radius) { return radius >= 2.0 * g.spacing() * (1.0 - 1e-12); }

}  // namespace

Mollifier mollifier(double delta, double theta, GridPtr grid) {
  const GroupId& group = grid->group();
  if (!(delta > 0.0 && delta <= group.diameter() * (1.0 + 1e-12)))
    throw InvalidArgument("cell diameter must lie in (0, diameter(G)]");
  const double r = mollifier_radius(delta, theta);
  if (!resolvable(*grid, r))
    throw ResolutionError("mollifier radius " + std::to_string(r) + " is below twice the grid spacing; need B >= " +
                          std::to_string(required_resolution(group, r)) + " (have " +
                          std::to_string(grid->resolution()) + ")");
  const double vol = ball_volume(group, r);
  const auto& norms = grid->norms();
  std::vector<Complex> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = norms[i] < r ? 1.0 / vol : 0.0;
  GridFunction phi(grid, std::move(v));
  const double err = std::abs(phi.integral() - Complex(1.0));
  return {std::move(phi), r, err};
}

SmoothedBadPart smooth_bad_part(const CzDecomposition& d, double theta, GridPtr grid, double bandwidth,
                                SmoothingMode mode) {
  if (grid != d.good.grid()) throw InvalidArgument("smoothing grid differs from the decomposition grid");
  const GroupId& group = grid->group();
  SmoothedBadPart out{GridFunction::zeros(grid), {}, {}};
  std::string unresolved;
  int need = 0;
  for (std::size_t j = 0; j < d.bad.size(); ++j) {
    const double r = mollifier_radius(std::min(d.bad[j].diameter, group.diameter()), theta);
    out.radii.push_back(r);
    if (!resolvable(*grid, r)) {
      unresolved += (unresolved.empty() ? "" : ", ") + std::to_string(j);
      need = std::max(need, required_resolution(group, r));
    }
  }
  if (!unresolved.empty())
    throw ResolutionError("mollifier radii of bad cells [" + unresolved + "] are below twice the grid spacing; need B >= " +
                          std::to_string(need));

  std::map<double, FourierCoefficients> phi_hat;
  for (std::size_t j = 0; j < d.bad.size(); ++j) {
    const auto& b = d.bad[j];
    const double r = out.radii[j];
    GridFunction piece = GridFunction::zeros(grid);
    if (mode == SmoothingMode::Fourier) {
      auto it = phi_hat.find(r);
      if (it == phi_hat.end()) {
        const double delta = std::min(b.diameter, group.diameter());
        it = phi_hat.emplace(r, forward_transform(mollifier(delta, theta, grid).phi, bandwidth)).first;
      }
      const auto bhat = forward_transform(b.to_grid_function(grid), bandwidth);
      piece = inverse_transform(convolve_fourier(bhat, it->second), grid);
    } else {
      const double inv_vol = 1.0 / ball_volume(group, r);
      for (std::size_t k = 0; k < b.members.size(); ++k) {
        const std::size_t y = b.members[k];
        const Complex wb = grid->weight(y) * b.values[k] * inv_vol;
        if (wb == Complex(0.0)) continue;
        const GroupPoint yinv = invert(grid->point(y));
        for (std::size_t x = 0; x < grid->size(); ++x)
          if (geodesic_norm(compose(yinv, grid->point(x))) < r) piece[x] += wb;
      }
    }
    out.total += piece;
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

nlohmann::json cz_summary_json(const CzDecomposition& d, const CzReport& report) {
  const auto& g = d.good.grid_ref();
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& b : d.bad) {
    cells.push_back({{"level", b.level},
                     {"cell", b.cell},
                     {"center", point_json(b.center)},
                     {"diameter", b.diameter},
                     {"measure", b.measure},
                     {"mean", {b.mean.real(), b.mean.imag()}},
                     {"bad_l1", b.l1_norm(g)}});
  }
  nlohmann::json props = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json p{{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"bound", c.bound}};
    p["violating_cell"] = c.violating_cell ? nlohmann::json(*c.violating_cell) : nlohmann::json(nullptr);
    props.push_back(std::move(p));
  }
  return {{"altitude", d.altitude},
          {"overlap_bound", d.overlap_bound},
          {"cells", cells},
          {"properties", props},
          {"all_passed", report.all_passed()}};
}

}  // namespace lieosc

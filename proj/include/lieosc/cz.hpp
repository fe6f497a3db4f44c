#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lieosc/group_fourier.hpp"

namespace lieosc {

struct DyadicCell {
  int parent = -1;  // index into the previous level, -1 at level 0
  GroupPoint center;
  double diameter = 0;
  double measure = 0;
  std::vector<std::size_t> members;  // grid indices, ascending
};

/// Nested partitions of a grid. Level 0 is the whole group; level k refines level k-1.
struct DyadicSystem {
  GridPtr grid;
  std::vector<std::vector<DyadicCell>> levels;
  std::vector<std::vector<int>> cell_of_point;  // [level][grid index] -> cell

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  /// Largest parent/child measure ratio over all levels.
  double max_refinement_ratio() const;
};

/// Deepest supported level. Leaves are single grid points when the resolution is a
/// power of two; SU(2) grids must have a power-of-two resolution.
int max_dyadic_depth(const QuadratureGrid& grid);

/// Torus: exact dyadic cubes, 2^{k n} cells at level k. SU(2): dyadic boxes in the
/// Euler index space (alpha, gamma halved by index, beta halved by Haar measure).
/// Requires a power-of-two resolution and 1 <= depth <= max_dyadic_depth(grid).
DyadicSystem build_dyadic_system(GridPtr grid, int depth);

struct BadCell {
  int level = 0;
  int cell = 0;
  GroupPoint center;
  double diameter = 0;
  double measure = 0;
  Complex mean = 0;                  // mean of f over the cell
  std::vector<std::size_t> members;  // support of b_j
  std::vector<Complex> values;       // b_j on the members

  double l1_norm(const QuadratureGrid& grid) const;
  Complex integral(const QuadratureGrid& grid) const;
  GridFunction to_grid_function(GridPtr grid) const;
};

struct CzDecomposition {
  GridFunction good;
  std::vector<BadCell> bad;
  double altitude = 0;
  int overlap_bound = 1;  // M_0; cells are disjoint

  GridFunction bad_total() const;
};

/// Stopping-time decomposition at `altitude`: maximal cells with mean |f| > altitude.
/// Requires altitude > mean of |f| over G.
CzDecomposition decompose(const GridFunction& f, double altitude, const DyadicSystem& system);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  double measured = 0;
  double bound = 0;
  std::optional<int> violating_cell;
};

struct CzReport {
  std::vector<PropertyCheck> checks;

  bool all_passed() const;
  const PropertyCheck& check(const std::string& name) const;
  /// Throws NumericalFailure naming the first failed property and cell.
  void require_all() const;
};

/// Reconstruction plus the six decomposition properties with explicit constants:
/// ||g||_inf <= 2^{n+1} a, ||g||_1 <= ||f||_1; supp b_j in I_j, int b_j = 0;
/// ||b_j||_1 <= 2^{n+2} a |I_j|; sum |I_j| <= ||f||_1 / a; sum ||b_j||_1 <= 2 ||f||_1;
/// overlap <= M_0.
CzReport verify_properties(const CzDecomposition& d, const GridFunction& f);

/// R = 2^{-1/(1-theta)} delta^{1/(1-theta)}.
double mollifier_radius(double delta, double theta);

struct Mollifier {
  GridFunction phi;
  double radius = 0;
  double quadrature_error = 0;  // |grid integral of phi - 1|
};

/// phi = |B(e,R)|^{-1} 1_{B(e,R)} with R = mollifier_radius(delta, theta).
/// Throws ResolutionError (with the required grid resolution) when R < 2 * spacing.
Mollifier mollifier(double delta, double theta, GridPtr grid);

enum class SmoothingMode {
  Fourier,  // b_j and phi_j transformed at the bandwidth, multiplied, resynthesized
  Direct,   // grid quadrature against the exact ball indicator
};

struct SmoothedBadPart {
  GridFunction total;
  std::vector<GridFunction> pieces;  // b~_j
  std::vector<double> radii;         // R_j
};

/// b~ = sum_j b_j * phi_j. Throws ResolutionError listing every unresolvable cell.
SmoothedBadPart smooth_bad_part(const CzDecomposition& d, double theta, GridPtr grid, double bandwidth,
                                SmoothingMode mode = SmoothingMode::Fourier);

nlohmann::json cz_summary_json(const CzDecomposition& d, const CzReport& report);

}  // namespace lieosc

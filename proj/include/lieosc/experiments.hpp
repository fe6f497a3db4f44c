#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lieosc/cz.hpp"
#include "lieosc/hormander.hpp"
#include "lieosc/multipliers.hpp"

namespace lieosc {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

/// (alpha, |{x : |u(x)| > alpha}|) for each alpha. Requires a non-empty, ascending grid.
std::vector<std::pair<double, double>> distribution_function(const GridFunction& u,
                                                             std::span<const double> alpha_grid);

/// 128 logarithmic levels spanning [1e-4 ||u||_inf, ||u||_inf].
inline constexpr int kAlphaGridSize = 128;
std::vector<double> weak_alpha_grid(double sup_norm);

struct TestFamily {
  enum class Kind { ApproximateIdentity, Atoms };
  Kind kind = Kind::ApproximateIdentity;
  std::vector<double> epsilons;  // ball radii
  int atoms_per_radius = 1;      // Atoms only
  std::uint64_t seed = 0;        // Atoms only
};

struct Weak11Row {
  std::string id;
  double epsilon = 0;
  double l1_norm = 0;
  double sup_level = 0;  // sup over the alpha grid of alpha |{|Tf| > alpha}|
  double ratio = 0;      // sup_level / ||f||_1
  int alpha_grid_size = 0;
  std::optional<std::string> error;
};

struct Weak11Report {
  std::vector<Weak11Row> rows;
};

/// Runs the family through T = apply_multiplier(symbol, ., bandwidth). A ball that
/// the grid cannot resolve produces an error row; the sweep continues.
Weak11Report weak11_sweep(const MultiplierSymbol& symbol, const TestFamily& family, double bandwidth,
                          GridPtr grid);

/// The T_theta sweep on build_grid(group, resolution).
Weak11Report weak11_sweep(const GroupId& group, double theta, const TestFamily& family, double bandwidth,
                          int resolution);

/// CSV (id, epsilon, l1_norm, sup_alpha_level, ratio) with header.
std::string weak11_csv(const Weak11Report& report);

/// |B(e,eps)|^{-1} 1_{B(e,eps)} on the grid.
GridFunction approximate_identity(GridPtr grid, double epsilon);

/// Exit codes of the experiment runner.
enum class ExitCode : int { Ok = 0, Validation = 2, Resolution = 3, Numerical = 4 };

/// Validated experiment configuration (JSON, schema version 1).
struct ExperimentConfig {
  std::string kind;  // plancherel | multiplier | kernel | seminorm | czd | weak11
  GroupId group = GroupId::torus(1);
  double theta = 0;
  double bandwidth = 0;
  int resolution = 0;
  std::optional<std::uint64_t> seed;
  nlohmann::json params;  // kind-specific block, validated by the runner
  nlohmann::json raw;     // the parsed document, echoed into the manifest
  std::string source;     // original text, used to locate fields in error messages

  /// Parses and validates. Throws InvalidArgument with a line-located message.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct RunResult {
  ExitCode code = ExitCode::Ok;
  std::string message;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs one experiment and writes its artifacts plus manifest.json into out_dir.
/// Files are written as "<name>.partial" and renamed once the run succeeds.
RunResult run_config(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                     std::optional<std::uint64_t> seed_override = std::nullopt);

/// Loads, validates and runs; validation problems become ExitCode::Validation.
RunResult run_config_file(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                          std::optional<std::uint64_t> seed_override = std::nullopt,
                          const std::string& expected_kind = "");

}  // namespace lieosc

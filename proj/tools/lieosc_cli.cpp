#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lieosc/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lieosc: Fourier analysis and oscillating singular integrals on T^n and SU(2)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lieosc::kLibraryVersion);

  std::string config, out_dir;
  std::optional<std::uint64_t> seed;
  const char* kinds[][2] = {
      {"plancherel", "random band-limited round trips and the Plancherel identity"},
      {"multiplier", "apply a spectral multiplier and report its decay constant"},
      {"kernel", "synthesize a multiplier kernel and fit its radial envelope"},
      {"seminorm", "lower-bound estimate of the oscillating Hormander seminorm"},
      {"czd", "Calderon-Zygmund decomposition with property report"},
      {"weak11", "weak-(1,1) ratio sweep over a test family"},
  };
  for (const auto& k : kinds) {
    CLI::App* sub = app.add_subcommand(k[0], k[1]);
    sub->add_option("--config", config, "experiment config (JSON, schema 1)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(lieosc::ExitCode::Validation);
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  lieosc::RunResult r;
  try {
    r = lieosc::run_config_file(config, out_dir, seed, kind);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(lieosc::ExitCode::Numerical);
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (r.code != lieosc::ExitCode::Ok) {
    std::cerr << "error: " << r.message << "\n";
    for (const auto& a : r.artifacts) std::cerr << "  partial: " << a.string() << "\n";
    return static_cast<int>(r.code);
  }
  for (const auto& a : r.artifacts) std::cout << a.string() << "\n";
  return 0;
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace spinlink::cli;

  CLI::App app{"Coupled-channel spin-wave network simulator"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Check a config file and print it with defaults");
  validate->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  RunOptions options;
  std::size_t grid_points = 0;
  const std::pair<const char*, const char*> simulations[] = {
      {"phase-sweep", "Output intensities of Ch1 and Ch2 versus theta0"},
      {"transport", "Directional transport spectra between Ch1 and Ch2"},
      {"noise-spectrum", "Quadrature noise spectra around the Larmor frequency"},
      {"discord", "Steady-state covariance, pairwise discord and quadrature witness"},
  };
  for (const auto& [name, help] : simulations) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "Output directory (must be empty unless --force)")
        ->required();
    sub->add_option("--seed", options.seed, "Seed recorded in the manifest")->capture_default_str();
    sub->add_flag("--force", options.force, "Write into a non-empty output directory");
    if (std::string(name) != "discord") {
      sub->add_option("--grid-points", grid_points, "Number of grid points");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (validate->parsed()) {
    return run_validate(config_path, std::cout, std::cerr);
  }
  auto* sub = app.get_subcommands().front();
  if (grid_points > 0) options.grid_points = grid_points;
  return run_simulation(sub->get_name(), options, std::cout, std::cerr);
}

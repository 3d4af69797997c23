#include <CLI11.hpp>
#include <iostream>

#include "bistatic/version.hpp"
#include "bistatic_cli/commands.hpp"

using namespace bistatic::cli;

int main(int argc, char** argv) {
  CLI::App app{"Bistatic radar position-error bounds and beam covariance optimization"};
  app.set_version_flag("--version", BISTATIC_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string target;
  std::string kind;
  std::string out_dir;
  bool full_res = false;
  bool dump = false;

  auto* point = app.add_subcommand("optimize-point", "Optimize the beam covariance for one scatterer position");
  point->add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
  point->add_option("--target", target, "Scatterer position X,Y in meters")->required();
  point->add_option("--out", out_dir, "Output directory");

  auto* map = app.add_subcommand("map", "Sweep the scatterer over a grid and write CSV/JSON maps");
  map->add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
  map->add_option("--kind", kind, "peb, power or role")->required()->check(CLI::IsMember({"peb", "power", "role"}));
  map->add_option("--out", out_dir, "Output directory");
  map->add_flag("--full-res", full_res, "Use the full-resolution grid");

  auto* check = app.add_subcommand("validate", "Run the embedded invariant suite");
  check->add_option("--config", config_path, "JSON run configuration (defaults when omitted)");

  auto* show = app.add_subcommand("show-config", "Print the effective configuration");
  show->add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
  show->add_flag("--defaults", dump, "Ignore --config and print the defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  RunConfig config;
  if (!config_path.empty() && !dump) {
    try {
      config = load_config(config_path);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  const std::optional<std::string> out =
      out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
  if (*point) return cmd_optimize_point(config, target, out, std::cout, std::cerr);
  if (*map) return cmd_map(config, kind, out, full_res, std::cout, std::cerr);
  if (*check) return cmd_validate(config, std::cout, std::cerr);
  if (*show) {
    std::cout << dump_config(config);
    return kExitOk;
  }
  return kExitConfig;
}

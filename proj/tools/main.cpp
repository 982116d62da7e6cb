#include <CLI11.hpp>

#include "colreact/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"colreact: collision detection and reaction simulator"};
  app.require_subcommand(1);

  std::string scenario, out, run_dir, format = "all";
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("--scenario", scenario, "scenario YAML file")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--seed", seed, "override the scenario seed");

  auto* compare = app.add_subcommand("compare", "run with the framework on and off");
  compare->add_option("--scenario", scenario, "scenario YAML file")->required();
  compare->add_option("--out", out, "output directory")->required();

  auto* exp = app.add_subcommand("export", "write plot-ready tables from a run directory");
  exp->add_option("--run", run_dir, "run directory")->required();
  exp->add_option("--format", format, "table, pointcloud or all")
      ->check(CLI::IsMember({"table", "pointcloud", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : colreact::kExitConfig;
  }

  if (*run) return colreact::cmd_run(scenario, out, seed);
  if (*compare) return colreact::cmd_compare(scenario, out);
  return colreact::cmd_export(run_dir, format);
}

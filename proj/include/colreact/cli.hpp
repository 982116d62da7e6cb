#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace colreact {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitSuccess = 0, kExitConfig = 1, kExitMission = 2 };

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override = std::nullopt);

/// Runs the scenario with the framework on and off (same seed) into
/// out_dir/on and out_dir/off and writes compare.json / compare.txt.
int cmd_compare(const std::string& scenario_path, const std::string& out_dir);

/// format: "table", "pointcloud" or "all". Files go to run_dir/export.
int cmd_export(const std::string& run_dir, const std::string& format);

}  // namespace colreact

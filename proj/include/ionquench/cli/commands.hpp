#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ionquench/cli/config.hpp"

namespace ionquench::cli {

enum class Command { visibility, curvature, phase_diagram, spectrum, spectrum_map, revivals, modes };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);
const std::vector<std::string>& command_names();

struct RunOptions {
    std::filesystem::path out_dir;
    int threads = 1;
};

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::size_t point_errors = 0;
};

/// Writes the command's CSV files, manifest.txt and timestamp.txt into
/// options.out_dir. Sweep points that fail are listed in the manifest and
/// leave NaN cells; single-point commands propagate the library error.
RunSummary run(Command command, const ScenarioConfig& config, const RunOptions& options);

}  // namespace ionquench::cli

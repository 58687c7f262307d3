#pragma once

// Subcommands of the lensforge batch tool. Each writes its CSV files into `out_dir`,
// prints a short report to `log` and returns the process exit status.

#include <filesystem>
#include <iosfwd>

#include "lensforge/config.hpp"

namespace lensforge {

enum ExitStatus : int { kExitOk = 0, kExitValidation = 1, kExitWarning = 2 };

int run_design(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int run_phase_center(const RunConfig& config, const std::filesystem::path& out_dir,
                     std::ostream& log);
int run_sweep(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int run_pattern(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int run_trace(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace lensforge

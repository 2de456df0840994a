#pragma once

#include <iosfwd>
#include <string>

#include "nlscatter/config.hpp"

namespace nlscatter {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitPrecondition = 2, kExitNumericalGuard = 3 };

// Runs the configured pipeline into out_dir (created when missing) and writes out_dir/manifest.json:
// config echo, version, thread cap, runtimes, every computed norm, the output files and the status.
// The manifest is written as "incomplete" before the pipeline starts and rewritten at the end.
int run_experiment(const RunConfig& cfg, const std::string& out_dir, int threads, std::ostream& log);

// Loads the config and runs it; parse and validation errors give exit code 2.
int run_config_file(const std::string& config_path, const std::string& out_dir, int threads, std::ostream& log);

std::string version_string();

}  // namespace nlscatter

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "widthlab/manifold.hpp"
#include "widthlab/tools/config.hpp"

namespace widthlab::tools {

struct RunOptions {
  std::string out_dir = "out";
  int workers = 1;
  std::string off_path; // mesh subcommand input
};

struct CommandResult {
  std::vector<std::string> files;
  // Checked invariants that failed; a nonempty list maps to exit code 3.
  std::vector<std::string> falsified;
};

CommandResult cmd_spectra(const ExperimentConfig& config, const RunOptions& options);
CommandResult cmd_kernel_scan(const ExperimentConfig& config, const RunOptions& options);
CommandResult cmd_packing(const ExperimentConfig& config, const RunOptions& options);
CommandResult cmd_widths(const ExperimentConfig& config, const RunOptions& options);
CommandResult cmd_rates(const ExperimentConfig& config, const RunOptions& options);
CommandResult cmd_mesh(const ExperimentConfig& config, const RunOptions& options);

// Closed-form manifold described by the config; mesh kinds go through cmd_mesh.
Manifold config_manifold(const ExperimentConfig& config);

// Runs fn(0..count-1) on up to `workers` threads. Results must be written by
// index; the first exception by index is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

} // namespace widthlab::tools

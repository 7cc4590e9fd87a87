#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "widthlab/errors.hpp"
#include "widthlab/tools/commands.hpp"

namespace widthlab::tools {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitFalsified = 3;

} // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"widthlab: spectral kernels, bump systems and n-width rates on compact manifolds"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  RunOptions options;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  app.add_option("--config", config_path, "Experiment configuration (JSON)")->required();
  app.add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Seed override (u64)");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  app.get_formatter()->column_width(28);

  using Command = CommandResult (*)(const ExperimentConfig&, const RunOptions&);
  std::vector<std::pair<CLI::App*, Command>> commands = {
      {app.add_subcommand("spectra", "Spectrum, Weyl fit and orthonormality report"), cmd_spectra},
      {app.add_subcommand("kernel-scan", "Kernel norms, localization profiles and propagation over the t-grid"),
       cmd_kernel_scan},
      {app.add_subcommand("packing", "Maximal packings over the N-grid"), cmd_packing},
      {app.add_subcommand("widths", "Finite-dimensional width table and optimizer validation"), cmd_widths},
      {app.add_subcommand("rates", "Chained lower bounds, rate fits and verdicts"), cmd_rates},
      {app.add_subcommand("mesh", "Mesh spectrum, eigenvalue groups and surrogate kernel scan"), cmd_mesh},
  };
  commands.back().first->add_option("--off", options.off_path, "OFF mesh file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  options.workers = workers;

  try {
    const ExperimentConfig config = load_config(config_path, seed);
    for (const auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      const CommandResult result = fn(config, options);
      for (const auto& f : result.files) std::cout << f << "\n";
      if (!result.falsified.empty()) {
        for (const auto& msg : result.falsified) std::cerr << "falsified: " << msg << "\n";
        return kExitFalsified;
      }
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError: return kExitValidation;
    case ErrorCode::Falsified: return kExitFalsified;
    default: return kExitError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

} // namespace widthlab::tools

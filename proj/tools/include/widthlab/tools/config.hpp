#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "widthlab/finite_widths.hpp"
#include "widthlab/rate_lab.hpp"
#include "widthlab/rational.hpp"

namespace widthlab::tools {

// Configuration error tied to a JSON field path such as "rates.specs[1].r".
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

struct ManifoldSpec {
  std::string kind = "circle"; // circle | torus | sphere | mesh
  std::vector<double> scale;   // circumference or torus sides; empty for defaults
  int torus_dimension = 2;
  double lambda_max = 4000.0;
  std::vector<int> resolution; // quadrature override; empty selects the band default
  std::string mesh_path;       // OFF file for kind = mesh
  int mesh_modes = 48;
};

struct FilterSpec {
  double Lambda = 1.0;
  double band_lo = 1.0, band_hi = 2.0;
  int Q = 0;
  double tail_rel = 1e-12;
};

struct WidthProblemSpec {
  LpIndex p, q;
  WidthKind kind = WidthKind::Kolmogorov;
};

struct Tolerances {
  double exponent = 0.15;           // rate verdicts
  double oracle_exponent = 0.05;    // exact L2 oracle fit
  double r2_retry = 0.98;           // fit retry threshold
  double optimizer_vs_exact = 1e-3; // widths validation table
  double propagation_margin = 0.1;  // measured radius <= (1 + margin) Lambda t
  double propagation = 0.0;         // absolute threshold; 0 selects 10 x tail bound
  double localization_spread = 2.0;
  double eigen_gap = 0.05;          // relative gap that separates eigenvalue groups
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  ManifoldSpec manifold;
  FilterSpec filter;
  std::vector<double> weyl_t_grid{400, 500, 625, 781.25, 976.5625, 1220.703125, 1525.87890625};
  std::vector<double> t_grid{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  std::vector<double> alphas{1.0, 2.0, std::numeric_limits<double>::infinity()};
  std::vector<double> point{0.3, 0.1};
  std::vector<int> N_grid{8, 16, 32, 64};
  std::vector<int> m_grid{4, 6, 8};
  std::vector<WidthProblemSpec> width_problems;
  OptimizerConfig optimizer;
  bool validate_widths = true;
  std::vector<SobolevSpec> specs;
  std::vector<WidthKind> kinds{WidthKind::Kolmogorov, WidthKind::Gelfand, WidthKind::Linear};
  std::vector<int> n_grid{8, 16, 32, 64};
  std::vector<int> oracle_n_grid{64, 128, 256, 512, 1024};
  int nu = 0;
  BumpFamilyConfig bumps;
  Tolerances tolerances;
};

// Parses and validates; seed_override replaces (or supplies) "seed".
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

// Canonical form of the effective configuration, the input to the config hash.
nlohmann::json to_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

} // namespace widthlab::tools

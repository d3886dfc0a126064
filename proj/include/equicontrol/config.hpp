#pragma once

// Problem configuration files (JSON). See docs/config.md for the schema.

#include <optional>
#include <string>

#include "equicontrol/equilibrium.hpp"
#include "equicontrol/verify.hpp"

namespace equicontrol {

struct ProblemConfig {
  double horizon = 1.0;
  int grid = TimeGrid::kDefaultSteps;
  double x0 = 0.0;
  double d_min = CoefficientSet::kDefaultDMin;
  ModelPaths paths;
  ObjectiveSpec objective = mean_variance(1.0, 2.0);
  SolverKind solver = SolverKind::Auto;
  SolverOptions solver_options;
  VerifyOptions verify;
  std::string output = "out";
  /// Canonical text of the effective configuration (sorted keys, overrides applied).
  std::string canonical;

  CoefficientSet coefficients() const { return CoefficientSet(paths, TimeGrid(horizon, grid), d_min); }
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::string> solver;
};

/// Parses config text; a run manifest (object with a "config" member) is
/// accepted and replays its embedded configuration. Throws Error(Config).
ProblemConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
ProblemConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Returns the config text with a numeric parameter replaced
/// (kappa, c, kappa_2, kappa_4 or T).
std::string with_parameter(const std::string& canonical, const std::string& parameter, double value);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace equicontrol

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "equicontrol/config.hpp"

namespace equicontrol::cli {

enum ExitStatus : int { kSuccess = 0, kCheckFailure = 1, kConfigError = 2, kSolverError = 3 };

struct Invocation {
  std::string config_path;
  std::optional<std::string> out_dir;
  ConfigOverrides overrides;
  // sweep only
  std::string parameter;
  std::vector<double> values;
};

int cmd_solve(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_verify(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Report and solution serializers (JSON text).
std::string solution_json(const EquilibriumSolution& sol, double x0);
std::string report_json(const VerificationReport& report);
std::string manifest_json(const ProblemConfig& cfg, const std::string& command, SolverKind used);

}  // namespace equicontrol::cli

#include "equicontrol/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace equicontrol::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const Eigen::ArrayXd& a) { return std::vector<double>(a.data(), a.data() + a.size()); }
json to_json(const Eigen::VectorXd& a) { return std::vector<double>(a.data(), a.data() + a.size()); }

fs::path prepare_out(const Invocation& inv, const ProblemConfig& cfg) {
  const fs::path dir = inv.out_dir ? fs::path(*inv.out_dir) : fs::path(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
}

int solver_status(const Error& e, std::ostream& err) {
  err << "solver error: " << e.what() << "\n";
  return kSolverError;
}

/// Loads and solves; returns a status other than kSuccess on failure.
int load_and_solve(const Invocation& inv, std::optional<ProblemConfig>& cfg, std::optional<EquilibriumSolution>& sol,
                   std::ostream& err) {
  std::optional<CoefficientSet> coeffs;
  try {
    cfg = load_config(inv.config_path, inv.overrides);
    coeffs.emplace(cfg->coefficients());
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    sol.emplace(solve(*coeffs, cfg->objective, cfg->solver, cfg->solver_options));
  } catch (const Error& e) {
    return solver_status(e, err);
  }
  return kSuccess;
}

}  // namespace

std::string solution_json(const EquilibriumSolution& sol, double x0) {
  const TimeGrid& grid = sol.grid();
  std::vector<double> u, v;
  for (int k = 0; k < grid.num_nodes(); ++k) {
    u.push_back(control(sol, grid.node(k), x0));
    v.push_back(value(sol, grid.node(k), x0));
  }
  json j;
  j["solver"] = to_string(sol.solver());
  j["objective"] = sol.objective().name();
  j["x0"] = x0;
  j["t"] = to_json(grid.nodes());
  j["y"] = to_json(sol.y());
  j["beta"] = to_json(sol.beta());
  j["control_at_x0"] = u;
  j["value_at_x0"] = v;
  j["concavity"] = {{"max_curvature", sol.concavity().max_curvature},
                    {"t_at_max", sol.concavity().t_at_max},
                    {"pass", sol.concavity().pass}};
  return j.dump(2) + "\n";
}

std::string report_json(const VerificationReport& r) {
  json j;
  j["pass"] = r.all_pass();
  j["integral_residual"] = {{"value", r.integral_residual}, {"pass", r.integral_residual_pass}};
  j["self_consistency"] = {{"value", r.self_consistency}, {"pass", r.self_consistency_pass}};
  j["concavity"] = {
      {"max_curvature", r.concavity.max_curvature}, {"t_at_max", r.concavity.t_at_max}, {"pass", r.concavity.pass}};
  j["evf"] = json::array();
  for (const auto& e : r.evf)
    j["evf"].push_back({{"t", e.t}, {"x", e.x}, {"evaluated", e.evaluated}, {"value", e.value}, {"pass", e.pass}});
  j["spike"] = json::array();
  for (const auto& s : r.spikes)
    j["spike"].push_back({{"t", s.t},
                          {"zeta", s.zeta},
                          {"epsilons", s.epsilons},
                          {"delta_J_over_eps", s.delta_J_over_eps},
                          {"extrapolated_limit", s.extrapolated_limit},
                          {"predicted_limit", s.predicted_limit},
                          {"pass", s.pass}});
  if (!r.fbsde.empty()) {
    double worst = 0.0, max_z = -std::numeric_limits<double>::infinity();
    for (const auto& f : r.fbsde) {
      worst = std::max(worst, f.linear_residual);
      max_z = std::max(max_z, f.Z_tt);
    }
    const auto& f0 = r.fbsde.front();
    j["fbsde"] = {{"pass", r.fbsde_pass},
                  {"nodes", r.fbsde.size()},
                  {"max_linear_residual", worst},
                  {"max_Z", max_z},
                  {"at_t0", {{"Y", f0.Y_tt}, {"calY", f0.calY_tt}, {"Z", f0.Z_tt}}}};
  }
  if (r.pde)
    j["pde"] = {{"pass", r.pde_pass},
                {"orders", r.pde->orders},
                {"t_samples", r.pde->t_samples},
                {"x_samples", r.pde->x_samples},
                {"scaled_residual", r.pde->scaled_residual},
                {"terminal_error", r.pde->terminal_error}};
  if (r.mc)
    j["monte_carlo"] = {{"pass", r.mc->all_pass()},
                        {"seed", r.mc->seed},
                        {"num_paths", r.mc->num_paths},
                        {"num_steps", r.mc->num_steps},
                        {"estimate", to_json(r.mc->estimate)},
                        {"standard_error", to_json(r.mc->standard_error)},
                        {"target", to_json(r.mc->target)},
                        {"moment_pass", r.mc->pass}};
  return j.dump(2) + "\n";
}

std::string manifest_json(const ProblemConfig& cfg, const std::string& command, SolverKind used) {
  const VerifyOptions& v = cfg.verify;
  json j;
  j["tool"] = "equicontrol";
  j["command"] = command;
  j["config"] = json::parse(cfg.canonical);
  j["config_hash"] = fnv1a_hex(cfg.canonical);
  j["solver_requested"] = to_string(cfg.solver);
  j["solver_used"] = to_string(used);
  j["tolerances"] = {{"ode", cfg.solver_options.ode_tolerance},
                     {"residual", v.residual_tolerance},
                     {"self_consistency", v.self_consistency_tolerance},
                     {"evf", v.evf_tolerance},
                     {"spike_sign", v.spike_options.sign_tolerance},
                     {"spike_match", v.spike_options.match_tolerance},
                     {"fbsde", v.fbsde_tolerance},
                     {"pde", v.pde_tolerance}};
  return j.dump(2) + "\n";
}

int cmd_solve(const Invocation& inv, std::ostream& out, std::ostream& err) {
  std::optional<ProblemConfig> cfg;
  std::optional<EquilibriumSolution> sol;
  if (int status = load_and_solve(inv, cfg, sol, err)) return status;
  try {
    const fs::path dir = prepare_out(inv, *cfg);
    std::ostringstream csv;
    write_csv(*sol, cfg->x0, csv);
    write_file(dir / "solution.csv", csv.str());
    write_file(dir / "solution.json", solution_json(*sol, cfg->x0));
    write_file(dir / "manifest.json", manifest_json(*cfg, "solve", sol->solver()));
    out << "solver " << to_string(sol->solver()) << "  y_0 " << sol->y()[0] << "  beta_0 " << sol->beta()[0]
        << "  u(0,x0) " << control(*sol, 0.0, cfg->x0) << "  V(0,x0) " << value(*sol, 0.0, cfg->x0) << "\n"
        << "wrote " << (dir / "solution.csv").string() << "\n";
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    }
    return solver_status(e, err);
  }
  return kSuccess;
}

int cmd_verify(const Invocation& inv, std::ostream& out, std::ostream& err) {
  std::optional<ProblemConfig> cfg;
  std::optional<EquilibriumSolution> sol;
  if (int status = load_and_solve(inv, cfg, sol, err)) return status;
  try {
    const fs::path dir = prepare_out(inv, *cfg);
    const VerificationReport report = run_verification(*sol, cfg->verify);
    write_file(dir / "report.json", report_json(report));
    write_file(dir / "manifest.json", manifest_json(*cfg, "verify", sol->solver()));
    const auto line = [&](const char* name, bool pass) { out << (pass ? "PASS " : "FAIL ") << name << "\n"; };
    line("integral-equation residual", report.integral_residual_pass);
    line("self-consistency", report.self_consistency_pass);
    line("concavity", report.concavity.pass);
    if (cfg->verify.evf) {
      bool ok = true;
      for (const auto& e : report.evf) ok = ok && e.pass;
      line("value-function consistency", ok);
    }
    if (cfg->verify.spike) {
      bool ok = true;
      for (const auto& s : report.spikes) ok = ok && s.pass;
      line("spike variations", ok);
    }
    if (cfg->verify.fbsde) line("fbsde diagonal", report.fbsde_pass);
    if (cfg->verify.pde) line("moment pde residuals", report.pde_pass);
    if (report.mc) line("monte carlo moments", report.mc->all_pass());
    out << "wrote " << (dir / "report.json").string() << "\n";
    return report.all_pass() ? kSuccess : kCheckFailure;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) {
      err << "config error: " << e.what() << "\n";
      return kConfigError;
    }
    return solver_status(e, err);
  }
}

int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream& err) {
  ProblemConfig base;
  std::vector<std::string> points;
  try {
    base = load_config(inv.config_path, inv.overrides);
    if (inv.values.empty()) throw Error(ErrorKind::Config, "sweep needs at least one value");
    for (double v : inv.values) points.push_back(with_parameter(base.canonical, inv.parameter, v));
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  std::ostringstream csv;
  csv << "value,beta_0,control_0,value_0,y_0\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::optional<ProblemConfig> cfg;
    std::optional<CoefficientSet> coeffs;
    try {
      cfg = parse_config(points[i]);
      coeffs.emplace(cfg->coefficients());
    } catch (const Error& e) {
      err << "config error at " << inv.parameter << "=" << inv.values[i] << ": " << e.what() << "\n";
      return kConfigError;
    }
    try {
      const EquilibriumSolution sol = solve(*coeffs, cfg->objective, cfg->solver, cfg->solver_options);
      char line[256];
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", inv.values[i], sol.beta()[0],
                    control(sol, 0.0, cfg->x0), value(sol, 0.0, cfg->x0), sol.y()[0]);
      csv << line;
    } catch (const Error& e) {
      err << "at " << inv.parameter << "=" << inv.values[i] << ": ";
      return solver_status(e, err);
    }
  }
  try {
    const fs::path dir = prepare_out(inv, base);
    write_file(dir / "sweep.csv", csv.str());
    write_file(dir / "manifest.json", manifest_json(base, "sweep " + inv.parameter, base.solver));
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  out << csv.str();
  return kSuccess;
}

}  // namespace equicontrol::cli

// equicontrol: solve, verify and sweep equilibrium strategies from a config file.

#include <iostream>

#include "CLI11.hpp"
#include "equicontrol/cli.hpp"

int main(int argc, char** argv) {
  using namespace equicontrol;
  CLI::App app{"Equilibrium controls for moment-based time-inconsistent objectives"};
  app.require_subcommand(1);

  cli::Invocation inv;
  std::string out_dir, solver;
  std::uint64_t seed = 0;
  int grid = 0;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "problem config (JSON) or a run manifest")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--grid", grid, "number of grid steps")->check(CLI::Range(2, 10'000'000));
    sub->add_option("--solver", solver, "closed_form | ode | algebraic | auto")
        ->check(CLI::IsMember({"closed_form", "ode", "algebraic", "auto"}));
  };
  CLI::App* solve = app.add_subcommand("solve", "solve and write the strategy table");
  CLI::App* verify = app.add_subcommand("verify", "solve and run the verification suite");
  CLI::App* sweep = app.add_subcommand("sweep", "tabulate time-0 quantities over a parameter");
  common(solve);
  common(verify);
  common(sweep);
  sweep->add_option("--param", inv.parameter, "kappa | c | kappa_2 | kappa_4 | T")
      ->required()
      ->check(CLI::IsMember({"kappa", "c", "kappa_2", "kappa_4", "T"}));
  sweep->add_option("--values", inv.values, "comma-separated values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? cli::kSuccess : cli::kConfigError;
  }
  for (CLI::App* sub : {solve, verify, sweep}) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) inv.out_dir = out_dir;
    if (sub->count("--seed")) inv.overrides.seed = seed;
    if (sub->count("--grid")) inv.overrides.grid = grid;
    if (sub->count("--solver")) inv.overrides.solver = solver;
  }
  try {
    if (solve->parsed()) return cli::cmd_solve(inv, std::cout, std::cerr);
    if (verify->parsed()) return cli::cmd_verify(inv, std::cout, std::cerr);
    return cli::cmd_sweep(inv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kSolverError;
  }
}

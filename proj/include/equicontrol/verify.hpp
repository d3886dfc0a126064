#pragma once

// Independent checks of a solved equilibrium: exact objective evaluation for
// deterministic controls, spike variations, the FBSDE diagonal condition,
// moment-PDE residuals and Monte Carlo simulation of the controlled SDE.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "equicontrol/equilibrium.hpp"

namespace equicontrol {

/// Deterministic, state-independent control s -> u(s) on [start, T]. The
/// evaluator splits its quadrature panels at the grid nodes and at every
/// breakpoint, so u only needs to be smooth between them.
struct DeterministicControl {
  std::function<double(double)> u;
  double start = 0.0;
  std::vector<double> breakpoints;

  /// The equilibrium control, which does not depend on the state.
  static DeterministicControl from_solution(const EquilibriumSolution& sol, double start = 0.0);
  /// Piecewise-linear interpolation of grid samples.
  static DeterministicControl from_samples(const TimeGrid& grid, Eigen::ArrayXd values, double start = 0.0);
  /// base + zeta on [t, t + eps)
  static DeterministicControl with_spike(DeterministicControl base, double t, double eps, double zeta);
};

/// N(mean, variance): the terminal law of X_T under a deterministic control.
struct TerminalLaw {
  double mean = 0.0;
  double variance = 0.0;
};

TerminalLaw terminal_law(const CoefficientSet& coeffs, double t, double x, const DeterministicControl& u);

/// J(t, x; u) = kappa m + psi(t, gaussian(v)) for the terminal law N(m, v).
double evaluate_deterministic(const CoefficientSet& coeffs, const ObjectiveSpec& spec, double t, double x,
                              const DeterministicControl& u);

struct SpikeOptions {
  std::vector<double> epsilon_fractions;  // of T - t; default 2^-4 .. 2^-10
  double sign_tolerance = 1e-6;
  double match_tolerance = 1e-3;

  static std::vector<double> default_fractions();
};

struct SpikeTestReport {
  double t = 0.0;
  double zeta = 0.0;
  std::vector<double> epsilons;
  std::vector<double> delta_J_over_eps;
  double extrapolated_limit = 0.0;
  double predicted_limit = 0.0;
  bool pass = false;
};

/// Predicted limit e^{2 int_t^T A} D_t^2 zeta^2 K(t, y_t).
double predicted_spike_limit(const EquilibriumSolution& sol, double t, double zeta);

SpikeTestReport spike_test(const EquilibriumSolution& sol, double t, double zeta, const SpikeOptions& options = {});

/// Runs every (t, zeta) pair, reusing the unperturbed evaluation per t.
std::vector<SpikeTestReport> spike_suite(const EquilibriumSolution& sol, const std::vector<double>& times,
                                         const std::vector<double>& zetas, const SpikeOptions& options = {});

struct FbsdeDiagonalReport {
  double t = 0.0;
  double Y_tt = 0.0;
  double calY_tt = 0.0;
  double Z_tt = 0.0;
  double linear_residual = 0.0;
  bool z_negative = false;
};

FbsdeDiagonalReport fbsde_diagonal_check(const EquilibriumSolution& sol, double t);

/// Closed-form raw moment E[X_T^j | X_t = x] under the equilibrium.
double raw_moment(const EquilibriumSolution& sol, int j, double t, double x);

struct PdeResidualReport {
  std::vector<int> orders;
  std::vector<double> t_samples, x_samples;
  /// per order: max |D_u m_j| / max |m_j| over the sample grid
  std::vector<double> scaled_residual;
  /// per order: max |m_j(T, x) - x^j|
  std::vector<double> terminal_error;
};

PdeResidualReport pde_residual_check(const EquilibriumSolution& sol, const std::vector<int>& orders,
                                     const std::vector<double>& t_samples, const std::vector<double>& x_samples);

struct McOptions {
  std::uint64_t seed = 20240601;
  std::int64_t num_paths = 1'000'000;
  int num_steps = 2048;
  int max_order = 6;
  /// 0: EQUICONTROL_THREADS, else hardware concurrency
  int threads = 0;
  double x0 = 0.0;
};

struct McReport {
  std::uint64_t seed = 0;
  std::int64_t num_paths = 0;
  int num_steps = 0;
  /// index = order; entry 1 is the mean, entries >= 2 central moments
  Eigen::VectorXd estimate, standard_error, target;
  std::vector<bool> pass;
  bool all_pass() const;
};

/// Euler-Maruyama simulation of X under the equilibrium from (0, x0). Paths
/// are grouped in fixed blocks, each with its own generator seeded from
/// (seed, block index), so results do not depend on the thread count.
McReport monte_carlo(const EquilibriumSolution& sol, const McOptions& options = {});

/// Thread count from EQUICONTROL_THREADS, capped by hardware concurrency.
int resolve_thread_count(int requested);

struct VerifyOptions {
  double x0 = 0.0;
  double residual_tolerance = 1e-8;
  double self_consistency_tolerance = 5e-6;

  bool evf = true;
  double evf_tolerance = 1e-8;
  std::vector<double> evf_times{0.0, 0.5};
  std::vector<double> evf_states{-1.0, 0.0, 2.0};

  bool spike = true;
  /// fractions of T
  std::vector<double> spike_times{0.0, 0.5, 0.9};
  std::vector<double> spike_zetas{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  SpikeOptions spike_options;

  bool fbsde = true;
  double fbsde_tolerance = 1e-8;

  bool pde = true;
  double pde_tolerance = 1e-5;
  int pde_max_order = 4;
  /// fractions of T
  std::vector<double> pde_times{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<double> pde_states{-2.0, -1.0, 0.0, 1.0, 2.0};

  bool monte_carlo = false;
  McOptions mc;
};

struct EvfRecord {
  double t, x, evaluated, value;
  bool pass;
};

struct VerificationReport {
  double integral_residual = 0.0;
  bool integral_residual_pass = false;
  double self_consistency = 0.0;
  bool self_consistency_pass = false;
  ConcavityReport concavity;

  std::vector<EvfRecord> evf;
  std::vector<SpikeTestReport> spikes;
  std::vector<FbsdeDiagonalReport> fbsde;
  bool fbsde_pass = true;
  std::optional<PdeResidualReport> pde;
  bool pde_pass = true;
  std::optional<McReport> mc;

  bool all_pass() const;
};

VerificationReport run_verification(const EquilibriumSolution& sol, const VerifyOptions& options);

}  // namespace equicontrol

#pragma once

// Equilibrium strategies u(t, x) = beta_t exp(-int_t^T A) - F_t / D_t, where
// beta solves  kappa B_t / D_t^2 + 2 beta_t K(t, y_t) = 0  with
// y_t = int_t^T (D_s beta_s)^2 ds.

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>

#include "equicontrol/coeffs.hpp"
#include "equicontrol/objectives.hpp"

namespace equicontrol {

enum class SolverKind { ClosedForm, Ode, Algebraic, Auto };

std::string to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);

struct SolverOptions {
  /// per-cell tolerance on the RK4 half-step error estimate
  double ode_tolerance = 1e-11;
  int max_refinement_depth = 12;
  int bisection_steps = 30;
  int newton_steps = 3;
};

struct ConcavityReport {
  double max_curvature = 0.0;  // max_k K(t_k, y_k); must be < 0
  double t_at_max = 0.0;
  bool pass = false;
};

class EquilibriumSolution {
 public:
  EquilibriumSolution(CoefficientSet coeffs, ObjectiveSpec objective, Eigen::ArrayXd y, Eigen::ArrayXd beta,
                      SolverKind solver);

  const CoefficientSet& coeffs() const { return coeffs_; }
  const TimeGrid& grid() const { return coeffs_.grid(); }
  const ObjectiveSpec& objective() const { return objective_; }
  SolverKind solver() const { return solver_; }

  const Eigen::ArrayXd& y() const { return y_; }
  const Eigen::ArrayXd& beta() const { return beta_; }
  /// -F_t / D_t at the nodes
  const Eigen::ArrayXd& control_offset() const { return control_offset_; }
  const DiscountCache& discount() const { return coeffs_.discount_cache(); }
  const ConcavityReport& concavity() const { return concavity_; }

  /// y at any t (cubic Hermite with y' = -(D beta)^2)
  double y_at(double t) const;
  /// beta at any t: stored value at nodes, kappa B / D^2 * (-1 / 2K(t, y_t)) in between
  double beta_at(double t) const;
  /// int_t^T B_s beta_s ds
  double mean_shift(double t) const;

 private:
  CoefficientSet coeffs_;
  ObjectiveSpec objective_;
  Eigen::ArrayXd y_, beta_, control_offset_;
  Eigen::ArrayXd y_rate_, shift_, shift_rate_;
  SolverKind solver_;
  ConcavityReport concavity_;
};

EquilibriumSolution solve_closed_form(const CoefficientSet& coeffs, const ObjectiveSpec& spec,
                                      const SolverOptions& options = {});
EquilibriumSolution solve_ode(const CoefficientSet& coeffs, const ObjectiveSpec& spec, const SolverOptions& options = {});
EquilibriumSolution solve_algebraic(const CoefficientSet& coeffs, const ObjectiveSpec& spec,
                                    const SolverOptions& options = {});

/// Closed form when one exists, else the algebraic route for moment
/// combinations, else the ODE.
EquilibriumSolution solve(const CoefficientSet& coeffs, const ObjectiveSpec& spec, SolverKind kind = SolverKind::Auto,
                          const SolverOptions& options = {});

/// u(t, x); independent of x.
double control(const EquilibriumSolution& sol, double t, double x);

/// V(t, x) = kappa Theta(t, x) + kappa int_t^T B beta + psi(t, alpha(y_t))
double value(const EquilibriumSolution& sol, double t, double x);

ConcavityReport concavity_check(const EquilibriumSolution& sol);

/// max_k |kappa B/D^2 + 2 beta K| / (1 + |kappa B/D^2|)
double integral_equation_residual(const EquilibriumSolution& sol);

/// max_k |y_from_beta(beta, t_k) - y_k|
double self_consistency_error(const EquilibriumSolution& sol);

/// Columns t, y, beta, control_at_x0, value_at_x0 at 17 significant digits.
void write_csv(const EquilibriumSolution& sol, double x0, std::ostream& out);

}  // namespace equicontrol

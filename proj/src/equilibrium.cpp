#include "equicontrol/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <functional>
#include <ostream>
#include <vector>

namespace equicontrol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

/// kappa B_t / D_t^2
double drive(const CoefficientSet& coeffs, double kappa, double t) {
  const double d = coeffs.d(t);
  return kappa * coeffs.b(t) / (d * d);
}

/// f(t, y) = -1 / (2 K(t, y)); throws when K >= 0.
double loading_factor(const ObjectiveSpec& spec, double t, double y) {
  const double k = curvature_sum(spec, t, y);
  if (!(k < 0.0) || !std::isfinite(k))
    throw Error(ErrorKind::Positivity, "curvature sum K(t,y) = " + std::to_string(k) + " is not negative at t=" +
                                           std::to_string(t) + ", y=" + std::to_string(y));
  return -0.5 / k;
}

bool trivially_zero(const CoefficientSet& coeffs, const ObjectiveSpec& spec) {
  return spec.kappa() == 0.0 || coeffs.b_is_zero();
}

EquilibriumSolution zero_solution(const CoefficientSet& coeffs, const ObjectiveSpec& spec, SolverKind kind) {
  const TimeGrid& grid = coeffs.grid();
  for (int k = 0; k < grid.num_nodes(); ++k) loading_factor(spec, grid.node(k), 0.0);
  return EquilibriumSolution(coeffs, spec, Eigen::ArrayXd::Zero(grid.num_nodes()), Eigen::ArrayXd::Zero(grid.num_nodes()),
                             kind);
}

/// Root of the increasing function value(y) = target on [0, hi].
double increasing_root(const std::function<double(double)>& value, const std::function<double(double)>& slope,
                       double target, double hi, const SolverOptions& options) {
  if (target <= 0.0) return 0.0;
  double lo = 0.0;
  for (int i = 0; i < options.bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < target ? lo : hi) = mid;
  }
  double y = 0.5 * (lo + hi);
  for (int i = 0; i < options.newton_steps; ++i) {
    const double d = slope(y);
    if (!(d > 0.0)) break;
    const double next = y - (value(y) - target) / d;
    if (!(next >= lo && next <= hi)) break;
    y = next;
  }
  return y;
}

double expand_bracket(const std::function<double(double)>& value, double target) {
  double hi = 1.0;
  for (int i = 0; i < 1100; ++i) {
    if (value(hi) >= target) return hi;
    hi *= 2.0;
  }
  throw Error(ErrorKind::Bracket, "could not bracket the root of the algebraic equation");
}

/// Integral of (E[H^2 exp(-H^2 z / 2)])^2 over [0, y] in closed form.
struct AmbiguousPotential {
  const DiscreteLaw& law;

  double operator()(double y) const {
    double sum = 0.0;
    const auto& h = law.support();
    const auto& p = law.weights();
    for (Eigen::Index i = 0; i < h.size(); ++i)
      for (Eigen::Index k = 0; k < h.size(); ++k) {
        const double s = h[i] * h[i] + h[k] * h[k];
        if (s == 0.0) continue;
        sum += p[i] * p[k] * h[i] * h[i] * h[k] * h[k] * 2.0 / s * -std::expm1(-0.5 * s * y);
      }
    return sum;
  }
  double supremum() const {
    double sum = 0.0;
    const auto& h = law.support();
    const auto& p = law.weights();
    for (Eigen::Index i = 0; i < h.size(); ++i)
      for (Eigen::Index k = 0; k < h.size(); ++k) {
        const double s = h[i] * h[i] + h[k] * h[k];
        if (s > 0.0) sum += p[i] * p[k] * h[i] * h[i] * h[k] * h[k] * 2.0 / s;
      }
    return sum;
  }
  double slope_root(double y) const {
    return law.expect([y](double v) { return v * v * std::exp(-0.5 * v * v * y); });
  }
};

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::ClosedForm: return "closed_form";
    case SolverKind::Ode: return "ode";
    case SolverKind::Algebraic: return "algebraic";
    case SolverKind::Auto: return "auto";
  }
  return "unknown";
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "closed_form") return SolverKind::ClosedForm;
  if (name == "ode") return SolverKind::Ode;
  if (name == "algebraic") return SolverKind::Algebraic;
  if (name == "auto") return SolverKind::Auto;
  throw Error(ErrorKind::Config, "unknown solver '" + name + "'");
}

EquilibriumSolution::EquilibriumSolution(CoefficientSet coeffs, ObjectiveSpec objective, Eigen::ArrayXd y,
                                         Eigen::ArrayXd beta, SolverKind solver)
    : coeffs_(std::move(coeffs)), objective_(std::move(objective)), y_(std::move(y)), beta_(std::move(beta)),
      solver_(solver) {
  const TimeGrid& grid = coeffs_.grid();
  const int n = grid.num_nodes();
  if (y_.size() != n || beta_.size() != n) throw Error(ErrorKind::GridMismatch, "solution paths do not match the grid");
  if (!y_.allFinite() || !beta_.allFinite()) throw Error(ErrorKind::StepFailure, "solution contains non-finite values");
  control_offset_.resize(n);
  y_rate_.resize(n);
  shift_rate_.resize(n);
  concavity_.max_curvature = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double t = grid.node(k);
    const double d = coeffs_.d(t);
    control_offset_[k] = -coeffs_.f(t) / d;
    y_rate_[k] = -(d * beta_[k]) * (d * beta_[k]);
    shift_rate_[k] = coeffs_.b(t) * beta_[k];
    const double curvature = curvature_sum(objective_, t, y_[k]);
    if (!(curvature <= concavity_.max_curvature)) {
      concavity_.max_curvature = curvature;
      concavity_.t_at_max = t;
    }
  }
  concavity_.pass = concavity_.max_curvature < 0.0;
  shift_ = tail_integrals(grid, shift_rate_);
}

double EquilibriumSolution::y_at(double t) const {
  grid().require_contains(t);
  return std::max(0.0, hermite(grid(), y_, y_rate_, grid().clamp(t)));
}

double EquilibriumSolution::beta_at(double t) const {
  grid().require_contains(t);
  const int node = grid().node_index(t);
  if (node >= 0) return beta_[node];
  if (trivially_zero(coeffs_, objective_)) return 0.0;
  const double tc = grid().clamp(t);
  return drive(coeffs_, objective_.kappa(), tc) * loading_factor(objective_, tc, y_at(tc));
}

double EquilibriumSolution::mean_shift(double t) const {
  grid().require_contains(t);
  return hermite(grid(), shift_, -shift_rate_, grid().clamp(t));
}

EquilibriumSolution solve_closed_form(const CoefficientSet& coeffs, const ObjectiveSpec& spec,
                                      const SolverOptions& options) {
  if (trivially_zero(coeffs, spec)) return zero_solution(coeffs, spec, SolverKind::ClosedForm);
  const TimeGrid& grid = coeffs.grid();
  const int n = grid.num_nodes();
  const double kappa = spec.kappa();
  const Eigen::ArrayXd& theta = coeffs.theta_nodes();
  const Eigen::ArrayXd target = kappa * kappa * theta;
  Eigen::ArrayXd y(n), beta(n);
  Eigen::ArrayXd drives(n);
  for (int k = 0; k < n; ++k) drives[k] = drive(coeffs, kappa, grid.node(k));

  std::visit(
      Overloaded{
          [&](const objective::MomentCombo& m) {
            for (int j = 6; j <= m.order(); j += 2)
              if (m.kappas[j] != 0.0)
                throw Error(ErrorKind::UnsupportedVariant, "no closed form beyond the fourth moment; use algebraic or ode");
            const double k2 = m.kappas[2];
            const double k4 = m.order() >= 4 ? m.kappas[4] : 0.0;
            if (!(k2 > 0.0)) throw Error(ErrorKind::Positivity, "kappa_2 must be positive when kappa > 0");
            if (k4 == 0.0) {
              y = target / (k2 * k2);
              beta = drives / k2;
              return;
            }
            // (kappa_2 + kappa_4 y / 2)^3 = kappa_2^3 + 3/2 kappa_4 kappa^2 theta
            for (int k = 0; k < n; ++k) {
              const double root = std::cbrt(k2 * k2 * k2 + 1.5 * k4 * target[k]);
              y[k] = 2.0 * (root - k2) / k4;
              beta[k] = drives[k] / root;
            }
          },
          [&](const objective::ExpPenalty& p) {
            y = (target).log1p() / (p.c * p.c);
            beta = drives / (p.c * (1.0 + target).sqrt());
          },
          [&](const objective::CoshPenalty& p) {
            y = (target).log1p() / (p.c * p.c);
            beta = drives / (p.c * (1.0 + target).sqrt());
          },
          [&](const objective::CosPenalty& p) {
            if (!(target[0] < 1.0))
              throw Error(ErrorKind::CosDomain,
                          "cosine penalty requires kappa^2 theta_0 < 1, got " + std::to_string(target[0]));
            y = -(-target).log1p() / (p.c * p.c);
            beta = drives / (p.c * (1.0 - target).sqrt());
          },
          [&](const objective::AmbiguousCos& p) {
            const AmbiguousPotential potential{p.law};
            if (!(target[0] < potential.supremum()))
              throw Error(ErrorKind::Domain, "ambiguous cosine penalty requires kappa^2 theta_0 < " +
                                                 std::to_string(potential.supremum()));
            const auto slope = [&](double v) {
              const double g = potential.slope_root(v);
              return g * g;
            };
            const double hi = expand_bracket(potential, target[0]);
            for (int k = 0; k < n; ++k) {
              y[k] = increasing_root(potential, slope, target[k], hi, options);
              beta[k] = drives[k] / potential.slope_root(y[k]);
            }
          },
          [&](const auto&) {
            throw Error(ErrorKind::UnsupportedVariant, spec.name() + " has no closed form; use the ode solver");
          },
      },
      spec.variant());
  return EquilibriumSolution(coeffs, spec, std::move(y), std::move(beta), SolverKind::ClosedForm);
}

EquilibriumSolution solve_algebraic(const CoefficientSet& coeffs, const ObjectiveSpec& spec,
                                    const SolverOptions& options) {
  const auto* combo = std::get_if<objective::MomentCombo>(&spec.variant());
  if (!combo) throw Error(ErrorKind::UnsupportedVariant, "the algebraic route needs a moment combination");
  if (trivially_zero(coeffs, spec)) return zero_solution(coeffs, spec, SolverKind::Algebraic);
  if (!(combo->kappas[2] > 0.0)) throw Error(ErrorKind::Positivity, "kappa_2 must be positive when kappa > 0");

  // q(z) = sum_j kappa_{2j+2} z^j / (2j)!!, P(y) = int_0^y q^2
  const int terms = combo->order() / 2;
  Eigen::VectorXd q(terms);
  for (int j = 0; j < terms; ++j) q[j] = combo->kappas[2 * j + 2] / double_factorial_fp(2 * j);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * terms);
  for (int i = 0; i < terms; ++i)
    for (int j = 0; j < terms; ++j) p[i + j + 1] += q[i] * q[j] / (i + j + 1);

  const auto horner = [](const Eigen::VectorXd& c, double x) {
    double v = 0.0;
    for (Eigen::Index i = c.size() - 1; i >= 0; --i) v = v * x + c[i];
    return v;
  };
  const auto potential = [&](double y) { return horner(p, y); };
  const auto slope = [&](double y) {
    const double v = horner(q, y);
    return v * v;
  };

  const TimeGrid& grid = coeffs.grid();
  const int n = grid.num_nodes();
  const double kappa = spec.kappa();
  const Eigen::ArrayXd target = kappa * kappa * coeffs.theta_nodes();
  const double hi = expand_bracket(potential, target.maxCoeff());
  Eigen::ArrayXd y(n), beta(n);
  for (int k = 0; k < n; ++k) {
    y[k] = increasing_root(potential, slope, target[k], hi, options);
    beta[k] = drive(coeffs, kappa, grid.node(k)) / horner(q, y[k]);
  }
  return EquilibriumSolution(coeffs, spec, std::move(y), std::move(beta), SolverKind::Algebraic);
}

EquilibriumSolution solve_ode(const CoefficientSet& coeffs, const ObjectiveSpec& spec, const SolverOptions& options) {
  if (trivially_zero(coeffs, spec)) return zero_solution(coeffs, spec, SolverKind::Ode);
  const TimeGrid& grid = coeffs.grid();
  const double kappa = spec.kappa();

  // In reversed time s = T - t: dy/ds = kappa^2 (B/D)^2 f(t, y)^2 with y(T) = 0.
  const auto rate = [&](double t, double yv) {
    if (yv < 0.0 || !std::isfinite(yv))
      throw Error(ErrorKind::StepFailure, "RK4 stage left y >= 0 at t=" + std::to_string(t));
    const double f = loading_factor(spec, t, yv);
    return kappa * kappa * coeffs.price_of_risk_sq(t) * f * f;
  };
  const auto rk4 = [&](double t, double yv, double h) {
    const double k1 = rate(t, yv);
    const double k2 = rate(t - 0.5 * h, yv + 0.5 * h * k1);
    const double k3 = rate(t - 0.5 * h, yv + 0.5 * h * k2);
    const double k4 = rate(t - h, yv + h * k3);
    return yv + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  std::function<double(double, double, double, int)> advance = [&](double t, double yv, double h, int depth) {
    const double full = rk4(t, yv, h);
    const double half = rk4(t - 0.5 * h, rk4(t, yv, 0.5 * h), 0.5 * h);
    if (std::abs(half - full) <= options.ode_tolerance * std::max(1.0, std::abs(half))) return half;
    if (depth >= options.max_refinement_depth)
      throw Error(ErrorKind::StepFailure, "RK4 refinement limit reached at t=" + std::to_string(t));
    const double mid = advance(t, yv, 0.5 * h, depth + 1);
    return advance(t - 0.5 * h, mid, 0.5 * h, depth + 1);
  };

  const int n = grid.num_nodes();
  Eigen::ArrayXd y(n), beta(n);
  y[n - 1] = 0.0;
  for (int k = n - 1; k > 0; --k) y[k - 1] = advance(grid.node(k), y[k], grid.node(k) - grid.node(k - 1), 0);
  for (int k = 0; k < n; ++k) {
    const double t = grid.node(k);
    beta[k] = drive(coeffs, kappa, t) * loading_factor(spec, t, y[k]);
  }
  return EquilibriumSolution(coeffs, spec, std::move(y), std::move(beta), SolverKind::Ode);
}

EquilibriumSolution solve(const CoefficientSet& coeffs, const ObjectiveSpec& spec, SolverKind kind,
                          const SolverOptions& options) {
  switch (kind) {
    case SolverKind::ClosedForm: return solve_closed_form(coeffs, spec, options);
    case SolverKind::Ode: return solve_ode(coeffs, spec, options);
    case SolverKind::Algebraic: return solve_algebraic(coeffs, spec, options);
    case SolverKind::Auto: break;
  }
  try {
    return solve_closed_form(coeffs, spec, options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnsupportedVariant) throw;
  }
  if (std::holds_alternative<objective::MomentCombo>(spec.variant())) return solve_algebraic(coeffs, spec, options);
  return solve_ode(coeffs, spec, options);
}

double control(const EquilibriumSolution& sol, double t, double x) {
  (void)x;
  const CoefficientSet& coeffs = sol.coeffs();
  coeffs.grid().require_contains(t);
  const double tc = coeffs.grid().clamp(t);
  return sol.beta_at(tc) * std::exp(-coeffs.log_discount(tc)) - coeffs.f(tc) / coeffs.d(tc);
}

double value(const EquilibriumSolution& sol, double t, double x) {
  const CoefficientSet& coeffs = sol.coeffs();
  coeffs.grid().require_contains(t);
  const double tc = coeffs.grid().clamp(t);
  const double kappa = sol.objective().kappa();
  return kappa * big_theta(coeffs, tc, x) + kappa * sol.mean_shift(tc) + psi_gaussian(sol.objective(), tc, sol.y_at(tc));
}

ConcavityReport concavity_check(const EquilibriumSolution& sol) { return sol.concavity(); }

double integral_equation_residual(const EquilibriumSolution& sol) {
  const TimeGrid& grid = sol.grid();
  double worst = 0.0;
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double t = grid.node(k);
    const double lhs = drive(sol.coeffs(), sol.objective().kappa(), t);
    const double residual = lhs + 2.0 * sol.beta()[k] * curvature_sum(sol.objective(), t, sol.y()[k]);
    worst = std::max(worst, std::abs(residual) / (1.0 + std::abs(lhs)));
  }
  return worst;
}

double self_consistency_error(const EquilibriumSolution& sol) {
  const TimeGrid& grid = sol.grid();
  const Eigen::ArrayXd& beta = sol.beta();
  Eigen::ArrayXd integrand(grid.num_nodes());
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double v = sol.coeffs().d(grid.node(k)) * beta[k];
    integrand[k] = v * v;
  }
  const Eigen::ArrayXd tail = tail_integrals(grid, integrand);
  return (tail - sol.y()).abs().maxCoeff();
}

void write_csv(const EquilibriumSolution& sol, double x0, std::ostream& out) {
  out << "t,y,beta,control_at_x0,value_at_x0\n";
  char line[256];
  const TimeGrid& grid = sol.grid();
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double t = grid.node(k);
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, sol.y()[k], sol.beta()[k],
                  control(sol, t, x0), value(sol, t, x0));
    out << line;
  }
}

}  // namespace equicontrol

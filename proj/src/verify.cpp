#include "equicontrol/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "equicontrol/quadrature.hpp"

namespace equicontrol {

namespace {

constexpr int kGaussPoints = 8;

const GaussRule<double>& panel_rule() {
  static const GaussRule<double> rule = gauss_legendre<double>(kGaussPoints);
  return rule;
}

/// Sorted panel edges covering [a, b]: grid nodes, extra breakpoints, a, b.
std::vector<double> panel_edges(const TimeGrid& grid, double a, double b, const std::vector<double>& extra) {
  std::vector<double> edges{a, b};
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double s = grid.node(k);
    if (s > a && s < b) edges.push_back(s);
  }
  for (double s : extra)
    if (s > a && s < b) edges.push_back(s);
  std::sort(edges.begin(), edges.end());
  const double slack = 1e-14 * grid.horizon();
  edges.erase(std::unique(edges.begin(), edges.end(), [slack](double l, double r) { return r - l <= slack; }),
              edges.end());
  return edges;
}

/// Integrates g over each panel with Gauss-Legendre; g returns (mean, variance) integrands.
template <typename Fn>
TerminalLaw integrate_panels(const std::vector<double>& edges, Fn&& g) {
  const GaussRule<double>& rule = panel_rule();
  TerminalLaw law;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      const auto [dm, dv] = g(mid + half * rule.nodes[i]);
      law.mean += half * rule.weights[i] * dm;
      law.variance += half * rule.weights[i] * dv;
    }
  }
  return law;
}

struct Integrands {
  double mean, variance;
};

TerminalLaw law_on(const CoefficientSet& coeffs, double a, double b, const DeterministicControl& u) {
  const auto edges = panel_edges(coeffs.grid(), a, b, u.breakpoints);
  return integrate_panels(edges, [&](double s) {
    const double e = std::exp(coeffs.log_discount(s));
    const double us = u.u(s);
    const double vol = coeffs.d(s) * us + coeffs.f(s);
    return Integrands{e * (coeffs.b(s) * us + coeffs.c(s)), e * e * vol * vol};
  });
}

double objective_at(const ObjectiveSpec& spec, double t, const TerminalLaw& law) {
  return spec.kappa() * law.mean + psi_gaussian(spec, t, std::max(0.0, law.variance));
}

/// Polynomial extrapolation to eps = 0 through the last (order + 1) points.
double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values, int order) {
  const int m = static_cast<int>(values.size());
  order = std::min(order, m - 1);
  std::vector<double> row(values.end() - (order + 1), values.end());
  std::vector<double> h(eps.end() - (order + 1), eps.end());
  for (int k = 1; k <= order; ++k)
    for (int i = order; i >= k; --i) row[i] = (h[i - k] * row[i] - h[i] * row[i - 1]) / (h[i - k] - h[i]);
  return row[order];
}

double spike_predicted(const EquilibriumSolution& sol, double t, double zeta) {
  const CoefficientSet& coeffs = sol.coeffs();
  const double d = coeffs.d(t);
  return std::exp(2.0 * coeffs.log_discount(t)) * d * d * zeta * zeta *
         curvature_sum(sol.objective(), t, sol.y_at(t));
}

std::vector<double> spike_epsilons(const EquilibriumSolution& sol, double t, const SpikeOptions& options) {
  const TimeGrid& grid = sol.grid();
  grid.require_contains(t);
  const double room = grid.horizon() - t;
  if (!(room > 0.0)) throw Error(ErrorKind::EpsilonRange, "spike test needs t < T");
  const auto fractions = options.epsilon_fractions.empty() ? SpikeOptions::default_fractions()
                                                           : options.epsilon_fractions;
  std::vector<double> eps;
  for (double f : fractions) {
    if (!(f > 0.0) || f > 1.0) throw Error(ErrorKind::EpsilonRange, "epsilon fractions must lie in (0, 1]");
    if (!eps.empty() && !(f * room < eps.back()))
      throw Error(ErrorKind::EpsilonRange, "epsilons must be strictly decreasing");
    eps.push_back(f * room);
  }
  return eps;
}

SpikeTestReport spike_from_base(const EquilibriumSolution& sol, double t, double zeta,
                                const std::vector<double>& eps, const TerminalLaw& base, const DeterministicControl& u,
                                const SpikeOptions& options) {
  const CoefficientSet& coeffs = sol.coeffs();
  const ObjectiveSpec& spec = sol.objective();
  SpikeTestReport report;
  report.t = t;
  report.zeta = zeta;
  report.epsilons = eps;
  for (double e : eps) {
    // The perturbed law differs from the base one only on the panels inside
    // [t, t + e); summing the difference there avoids cancellation.
    const auto edges = panel_edges(coeffs.grid(), t, t + e, u.breakpoints);
    const TerminalLaw delta = integrate_panels(edges, [&](double s) {
      const double ex = std::exp(coeffs.log_discount(s));
      const double d = coeffs.d(s);
      const double vol = d * u.u(s) + coeffs.f(s);
      return Integrands{ex * coeffs.b(s) * zeta, ex * ex * d * zeta * (2.0 * vol + d * zeta)};
    });
    const double v = std::max(0.0, base.variance);
    const double dj = spec.kappa() * delta.mean + (psi_gaussian(spec, t, std::max(0.0, v + delta.variance)) -
                                                   psi_gaussian(spec, t, v));
    report.delta_J_over_eps.push_back(dj / e);
  }
  report.extrapolated_limit = extrapolate_to_zero(report.epsilons, report.delta_J_over_eps, 2);
  report.predicted_limit = spike_predicted(sol, t, zeta);
  const double gap = std::abs(report.extrapolated_limit - report.predicted_limit);
  report.pass = report.extrapolated_limit <= options.sign_tolerance &&
                gap <= options.match_tolerance * (std::abs(report.predicted_limit) + 1e-7);
  return report;
}

}  // namespace

DeterministicControl DeterministicControl::from_solution(const EquilibriumSolution& sol, double start) {
  return {[&sol](double s) { return control(sol, s, 0.0); }, start, {}};
}

DeterministicControl DeterministicControl::from_samples(const TimeGrid& grid, Eigen::ArrayXd values, double start) {
  if (values.size() != grid.num_nodes()) throw Error(ErrorKind::GridMismatch, "control samples do not match grid");
  if (!values.allFinite()) throw Error(ErrorKind::Domain, "control samples must be finite");
  return {[grid, values = std::move(values)](double s) {
            const int k = grid.cell(s);
            const double w = (grid.clamp(s) - grid.node(k)) / grid.step();
            return (1.0 - w) * values[k] + w * values[k + 1];
          },
          start,
          {}};
}

DeterministicControl DeterministicControl::with_spike(DeterministicControl base, double t, double eps, double zeta) {
  const double end = t + eps;
  DeterministicControl out;
  out.start = base.start;
  out.breakpoints = base.breakpoints;
  out.breakpoints.push_back(t);
  out.breakpoints.push_back(end);
  out.u = [u = std::move(base.u), t, end, zeta](double s) { return u(s) + (s >= t && s < end ? zeta : 0.0); };
  return out;
}

TerminalLaw terminal_law(const CoefficientSet& coeffs, double t, double x, const DeterministicControl& u) {
  const TimeGrid& grid = coeffs.grid();
  grid.require_contains(t);
  if (t < u.start - 1e-12 * grid.horizon()) throw Error(ErrorKind::Domain, "control is not defined from t onwards");
  const double tc = grid.clamp(t);
  TerminalLaw law = law_on(coeffs, tc, grid.horizon(), u);
  law.mean += x * std::exp(coeffs.log_discount(tc));
  return law;
}

double evaluate_deterministic(const CoefficientSet& coeffs, const ObjectiveSpec& spec, double t, double x,
                              const DeterministicControl& u) {
  return objective_at(spec, t, terminal_law(coeffs, t, x, u));
}

std::vector<double> SpikeOptions::default_fractions() {
  std::vector<double> out;
  for (int k = 4; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

double predicted_spike_limit(const EquilibriumSolution& sol, double t, double zeta) {
  return spike_predicted(sol, t, zeta);
}

SpikeTestReport spike_test(const EquilibriumSolution& sol, double t, double zeta, const SpikeOptions& options) {
  return spike_suite(sol, {t}, {zeta}, options).front();
}

std::vector<SpikeTestReport> spike_suite(const EquilibriumSolution& sol, const std::vector<double>& times,
                                         const std::vector<double>& zetas, const SpikeOptions& options) {
  std::vector<SpikeTestReport> out;
  for (double t : times) {
    const auto eps = spike_epsilons(sol, t, options);
    DeterministicControl u = DeterministicControl::from_solution(sol, t);
    u.breakpoints.push_back(t);
    for (double e : eps) u.breakpoints.push_back(t + e);
    const TerminalLaw base = law_on(sol.coeffs(), t, sol.grid().horizon(), u);
    for (double zeta : zetas) out.push_back(spike_from_base(sol, t, zeta, eps, base, u, options));
  }
  return out;
}

FbsdeDiagonalReport fbsde_diagonal_check(const EquilibriumSolution& sol, double t) {
  const CoefficientSet& coeffs = sol.coeffs();
  sol.grid().require_contains(t);
  const double tc = sol.grid().clamp(t);
  const double e = std::exp(coeffs.log_discount(tc));
  const double k2 = 2.0 * curvature_sum(sol.objective(), tc, sol.y_at(tc));
  FbsdeDiagonalReport r;
  r.t = tc;
  r.Y_tt = sol.objective().kappa() * e;
  r.calY_tt = e * coeffs.d(tc) * sol.beta_at(tc) * k2;
  r.Z_tt = e * e * k2;
  r.linear_residual = std::abs(coeffs.b(tc) * r.Y_tt + coeffs.d(tc) * r.calY_tt);
  r.z_negative = r.Z_tt < 0.0;
  return r;
}

double raw_moment(const EquilibriumSolution& sol, int j, double t, double x) {
  if (j < 0) throw Error(ErrorKind::Domain, "moment order must be non-negative");
  const double mu = big_theta(sol.coeffs(), t, x) + sol.mean_shift(t);
  const double y = sol.y_at(t);
  double sum = 0.0, binom = 1.0;
  for (int k = 0; k <= j; ++k) {
    sum += binom * std::pow(mu, j - k) * alpha(k, y);
    binom = binom * (j - k) / (k + 1);
  }
  return sum;
}

PdeResidualReport pde_residual_check(const EquilibriumSolution& sol, const std::vector<int>& orders,
                                     const std::vector<double>& t_samples, const std::vector<double>& x_samples) {
  const CoefficientSet& coeffs = sol.coeffs();
  const double horizon = sol.grid().horizon();
  for (double t : t_samples)
    if (!(t >= 0.0 && t < horizon)) throw Error(ErrorKind::Domain, "PDE samples need t in [0, T)");
  for (double x : x_samples)
    if (!std::isfinite(x)) throw Error(ErrorKind::Domain, "PDE samples need finite x");
  const double dt = horizon / 4096.0;

  PdeResidualReport report{orders, t_samples, x_samples, {}, {}};
  for (int j : orders) {
    const auto m = [&](double t, double x) { return raw_moment(sol, j, t, x); };
    double worst = 0.0, scale = 0.0, terminal = 0.0;
    for (double t : t_samples)
      for (double x : x_samples) {
        double m_t;
        if (t - 2.0 * dt >= 0.0 && t + 2.0 * dt <= horizon) {
          m_t = (-m(t + 2 * dt, x) + 8 * m(t + dt, x) - 8 * m(t - dt, x) + m(t - 2 * dt, x)) / (12 * dt);
        } else {
          const double h = t - 2.0 * dt < 0.0 ? dt : -dt;
          m_t = (-25 * m(t, x) + 48 * m(t + h, x) - 36 * m(t + 2 * h, x) + 16 * m(t + 3 * h, x) -
                 3 * m(t + 4 * h, x)) /
                (12 * h);
        }
        const double dx = 1e-3 * (1.0 + std::abs(x));
        const double m0 = m(t, x), p1 = m(t, x + dx), n1 = m(t, x - dx), p2 = m(t, x + 2 * dx),
                     n2 = m(t, x - 2 * dx);
        const double m_x = (-p2 + 8 * p1 - 8 * n1 + n2) / (12 * dx);
        const double m_xx = (-p2 + 16 * p1 - 30 * m0 + 16 * n1 - n2) / (12 * dx * dx);
        const double u = control(sol, t, x);
        const double vol = coeffs.d(t) * u + coeffs.f(t);
        const double residual =
            m_t + m_x * (coeffs.a(t) * x + coeffs.b(t) * u + coeffs.c(t)) + 0.5 * m_xx * vol * vol;
        worst = std::max(worst, std::abs(residual));
        scale = std::max(scale, std::abs(m0));
      }
    for (double x : x_samples) terminal = std::max(terminal, std::abs(m(horizon, x) - std::pow(x, j)));
    report.scaled_residual.push_back(scale > 0.0 ? worst / scale : worst);
    report.terminal_error.push_back(terminal);
  }
  return report;
}

bool McReport::all_pass() const {
  return std::all_of(pass.begin(), pass.end(), [](bool p) { return p; });
}

bool VerificationReport::all_pass() const {
  bool ok = integral_residual_pass && self_consistency_pass && concavity.pass && fbsde_pass && pde_pass;
  for (const auto& r : evf) ok = ok && r.pass;
  for (const auto& r : spikes) ok = ok && r.pass;
  if (mc) ok = ok && mc->all_pass();
  return ok;
}

VerificationReport run_verification(const EquilibriumSolution& sol, const VerifyOptions& options) {
  VerificationReport report;
  const double horizon = sol.grid().horizon();
  const double kappa = sol.objective().kappa();

  report.integral_residual = integral_equation_residual(sol);
  report.integral_residual_pass = report.integral_residual <= options.residual_tolerance;
  report.self_consistency = self_consistency_error(sol);
  report.self_consistency_pass = report.self_consistency <= options.self_consistency_tolerance;
  report.concavity = concavity_check(sol);

  if (options.evf) {
    for (double frac : options.evf_times) {
      const double t = frac * horizon;
      const DeterministicControl u = DeterministicControl::from_solution(sol, t);
      for (double x : options.evf_states) {
        const double j = evaluate_deterministic(sol.coeffs(), sol.objective(), t, x, u);
        const double v = value(sol, t, x);
        report.evf.push_back({t, x, j, v, std::abs(j - v) <= options.evf_tolerance * (1.0 + std::abs(v))});
      }
    }
  }
  if (options.spike) {
    std::vector<double> times;
    for (double frac : options.spike_times)
      if (frac < 1.0) times.push_back(frac * horizon);
    report.spikes = spike_suite(sol, times, options.spike_zetas, options.spike_options);
  }
  if (options.fbsde) {
    for (int k = 0; k < sol.grid().num_steps(); ++k) {
      auto r = fbsde_diagonal_check(sol, sol.grid().node(k));
      report.fbsde_pass = report.fbsde_pass && r.z_negative &&
                          r.linear_residual <= options.fbsde_tolerance * (1.0 + kappa);
      report.fbsde.push_back(r);
    }
  }
  if (options.pde) {
    std::vector<int> orders;
    for (int j = 1; j <= options.pde_max_order; ++j) orders.push_back(j);
    std::vector<double> times;
    for (double frac : options.pde_times) times.push_back(frac * horizon);
    report.pde = pde_residual_check(sol, orders, times, options.pde_states);
    for (std::size_t i = 0; i < orders.size(); ++i)
      report.pde_pass = report.pde_pass && report.pde->scaled_residual[i] <= options.pde_tolerance &&
                        report.pde->terminal_error[i] <= options.pde_tolerance;
  }
  if (options.monte_carlo) {
    McOptions mc = options.mc;
    mc.x0 = options.x0;
    report.mc = monte_carlo(sol, mc);
  }
  return report;
}

}  // namespace equicontrol

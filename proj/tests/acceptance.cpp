// Acceptance checks: one PASS/FAIL line per criterion, tolerances pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "cases.hpp"
#include "equicontrol/verify.hpp"

using namespace equicontrol;

namespace {

constexpr double kClosedFormTol = 1e-6;
constexpr double kClosedFormSeconds = 1.0;
constexpr int kRandomCombos = 20;
constexpr double kCrossSolverRelTol = 1e-6;
constexpr double kCrossSolverSeconds = 10.0;
constexpr double kResidualTol = 1e-8;
constexpr double kSpikeSignTol = 1e-6;
constexpr double kSpikeMatchRelTol = 1e-3;
constexpr double kSpikeSeconds = 5.0;
constexpr double kFbsdeTol = 1e-8;
constexpr std::int64_t kMcPaths = 1'000'000;
constexpr int kMcSteps = 2048;
constexpr std::uint64_t kMcSeed = 20240601;
constexpr double kMcSeconds = 60.0;
constexpr double kStandardizedTol = 1e-5;
constexpr double kPdeTol = 1e-5;
constexpr double kEvfTol = 1e-8;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s  %2d  %-34s %8.3fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

int main() {
  const auto solved = [] {
    std::vector<std::pair<std::string, EquilibriumSolution>> out;
    for (const auto& c : cases::solved_cases()) out.emplace_back(c.name, c.solve());
    return out;
  }();
  const CoefficientSet base(cases::constant_paths(), TimeGrid(1.0, 512));

  criterion(1, "closed-form agreement (ode, exp)", [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto sol = solve_ode(base, ObjectiveSpec(1.0, objective::ExpPenalty{1.0}));
    const double secs = seconds_since(start);
    const double err = std::abs(sol.y()[0] - std::log(3.25));
    return Outcome{err <= kClosedFormTol && secs < kClosedFormSeconds, fmt("|y0 - ln 3.25| = %.2e, solve %.3fs", err, secs)};
  });

  criterion(2, "cross-solver equivalence", [&] {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> order(2, 8);
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < kRandomCombos; ++i) {
      const ObjectiveSpec spec = cases::random_combo(rng, order(rng));
      const auto a = solve_algebraic(base, spec);
      const auto o = solve_ode(base, spec);
      worst = std::max(worst, (a.beta() - o.beta()).abs().maxCoeff() / a.beta().abs().maxCoeff());
    }
    const double secs = seconds_since(start);
    return Outcome{worst <= kCrossSolverRelTol && secs < kCrossSolverSeconds,
                   fmt("max rel |dbeta| = %.2e over 20 instances, %.2fs", worst, secs)};
  });

  criterion(3, "integral-equation residual", [&] {
    double worst = 0.0;
    for (const auto& [name, sol] : solved) worst = std::max(worst, integral_equation_residual(sol));
    return Outcome{worst <= kResidualTol, fmt("max scaled residual = %.2e", worst)};
  });

  criterion(4, "spike-variation suite", [&] {
    SpikeOptions opts;
    opts.sign_tolerance = kSpikeSignTol;
    opts.match_tolerance = kSpikeMatchRelTol;
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    double worst_gap = 0.0, max_limit = -1e300;
    for (const auto& [name, sol] : solved) {
      for (const auto& r : spike_suite(sol, {0.0, 0.5, 0.9}, {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}, opts)) {
        ok = ok && r.extrapolated_limit <= kSpikeSignTol &&
             std::abs(r.extrapolated_limit - r.predicted_limit) <= kSpikeMatchRelTol * std::abs(r.predicted_limit);
        worst_gap = std::max(worst_gap, std::abs(r.extrapolated_limit - r.predicted_limit) / std::abs(r.predicted_limit));
        max_limit = std::max(max_limit, r.extrapolated_limit);
      }
    }
    const double mv = spike_test(solved.front().second, 0.0, 1.0, opts).extrapolated_limit;
    const double secs = seconds_since(start);
    ok = ok && std::abs(mv + 0.04) <= kSpikeMatchRelTol * 0.04 && secs < kSpikeSeconds;
    char buf[200];
    std::snprintf(buf, sizeof buf, "max rel gap %.2e, max limit %.3e, MV limit %.8f, %.2fs", worst_gap, max_limit, mv,
                  secs);
    return Outcome{ok, buf};
  });

  criterion(5, "fbsde diagonal", [&] {
    double worst = 0.0, max_z = -1e300;
    bool ok = true;
    for (const auto& [name, sol] : solved) {
      const double kappa = sol.objective().kappa();
      for (int k = 0; k < sol.grid().num_steps(); ++k) {
        const auto r = fbsde_diagonal_check(sol, sol.grid().node(k));
        ok = ok && r.z_negative && r.linear_residual <= kFbsdeTol * (1.0 + kappa);
        worst = std::max(worst, r.linear_residual);
        max_z = std::max(max_z, r.Z_tt);
      }
    }
    return Outcome{ok, fmt("max |BY + D calY| = %.2e, max Z = %.4f", worst, max_z)};
  });

  criterion(6, "monte carlo moments (mean-variance)", [&] {
    McOptions o;
    o.seed = kMcSeed;
    o.num_paths = kMcPaths;
    o.num_steps = kMcSteps;
    o.max_order = 5;
    const auto start = std::chrono::steady_clock::now();
    const McReport r = monte_carlo(solved.front().second, o);
    const double secs = seconds_since(start);
    bool ok = secs < kMcSeconds && std::abs(r.target[2] - 0.5625) < 1e-12 &&
              std::abs(r.target[4] - 3 * 0.5625 * 0.5625) < 1e-12;
    std::string detail;
    for (int k = 2; k <= 5; ++k) {
      ok = ok && r.pass[k];
      detail += fmt("M%.0f %.5f", k, r.estimate[k]) + fmt(" (%.1f SE)  ", (r.estimate[k] - r.target[k]) / r.standard_error[k]);
    }
    return Outcome{ok, detail + fmt("%.1fs", secs)};
  });

  criterion(7, "standardized moments reduce to MV", [&] {
    const auto sol = solve_ode(base, ObjectiveSpec(1.0, objective::StandardizedMoments{cases::weights({2.0, 1.0})}));
    const double err = (sol.beta() - 3.75).abs().maxCoeff();
    return Outcome{err <= kStandardizedTol, fmt("max |beta - 3.75| = %.2e", err)};
  });

  criterion(8, "odd-preference invariance", [&] {
    const auto with_odd = [](double k3, double k5) {
      return moment_combo(1.0, cases::weights({1.0, k3, 1.0, k5, 0.5}));
    };
    const auto ref = solve_algebraic(base, with_odd(0, 0));
    bool ok = true;
    for (auto [k3, k5] : {std::pair{1.0, 2.0}, std::pair{-3.0, 4.0}}) {
      const auto s = solve_algebraic(base, with_odd(k3, k5));
      ok = ok && (s.beta() == ref.beta()).all() && (s.y() == ref.y()).all();
    }
    return Outcome{ok, ok ? "bitwise identical beta and y" : "outputs differ"};
  });

  criterion(9, "moment pde residuals", [&] {
    double worst = 0.0;
    bool ok = true;
    for (const auto& [name, sol] : solved) {
      if (name != "mean_variance" && name != "exp_penalty") continue;
      const auto r = pde_residual_check(sol, {1, 2, 3, 4}, {0.0, 0.2, 0.4, 0.6, 0.8}, {-2.0, -1.0, 0.0, 1.0, 2.0});
      for (std::size_t i = 0; i < r.orders.size(); ++i) {
        ok = ok && r.scaled_residual[i] <= kPdeTol && r.terminal_error[i] == 0.0;
        worst = std::max(worst, r.scaled_residual[i]);
      }
    }
    return Outcome{ok, fmt("max scaled residual = %.2e", worst)};
  });

  criterion(10, "value-function consistency", [&] {
    double worst = 0.0;
    for (const auto& [name, sol] : solved)
      for (double t : {0.0, 0.5}) {
        const auto u = DeterministicControl::from_solution(sol, t);
        for (double x : {-1.0, 0.0, 2.0}) {
          const double v = value(sol, t, x);
          const double j = evaluate_deterministic(sol.coeffs(), sol.objective(), t, x, u);
          worst = std::max(worst, std::abs(j - v) / (1.0 + std::abs(v)));
        }
      }
    return Outcome{worst <= kEvfTol, fmt("max |J - V| / (1 + |V|) = %.2e", worst)};
  });

  criterion(11, "cosine domain guard", [&] {
    int rejected = 0;
    for (double b : {0.3, 0.2}) {  // kappa^2 theta_0 = 2.25 and exactly 1
      try {
        solve(CoefficientSet(cases::constant_paths(b), TimeGrid(1.0)), ObjectiveSpec(1.0, objective::CosPenalty{1.0}));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::CosDomain) ++rejected;
      }
    }
    return Outcome{rejected == 2, fmt("%.0f of 2 inadmissible configs rejected with cos-domain", rejected)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "cases.hpp"
#include "doctest.h"
#include "equicontrol/verify.hpp"

using namespace equicontrol;
using doctest::Approx;

TEST_SUITE("verify") {
  const CoefficientSet base(cases::constant_paths(), TimeGrid(1.0));

  TEST_CASE("deterministic evaluation of trivial controls") {
    const CoefficientSet c({0.05, 0.3, 0.0, 0.2, 0.1}, TimeGrid(1.0));
    const auto spec = mean_variance(1.0, 2.0);
    // zero-volatility control u = -F/D: no variance
    DeterministicControl flat{[](double) { return -0.5; }, 0.0, {}};
    const TerminalLaw law = terminal_law(c, 0.0, 2.0, flat);
    CHECK(law.variance == Approx(0.0).scale(1.0));
    CHECK(law.mean == Approx(2.0 * std::exp(0.05) - 0.15 * std::expm1(0.05) / 0.05).epsilon(1e-13));
    CHECK(evaluate_deterministic(c, spec, 0.0, 2.0, flat) == Approx(law.mean));
    // u = 0 with F = 0
    const CoefficientSet c0({0.05, 0.3, 0.02, 0.2, 0.0}, TimeGrid(1.0));
    DeterministicControl zero{[](double) { return 0.0; }, 0.0, {}};
    CHECK(evaluate_deterministic(c0, spec, 0.0, 1.0, zero) ==
          Approx(std::exp(0.05) + 0.02 * std::expm1(0.05) / 0.05).epsilon(1e-13));
  }

  TEST_CASE("value-function consistency on every case") {
    for (const auto& c : cases::solved_cases()) {
      CAPTURE(c.name);
      const auto sol = c.solve();
      for (double t : {0.0, 0.5}) {
        const auto u = DeterministicControl::from_solution(sol, t);
        for (double x : {-1.0, 0.0, 2.0}) {
          const double v = value(sol, t, x);
          CHECK(std::abs(evaluate_deterministic(sol.coeffs(), sol.objective(), t, x, u) - v) <= 1e-8 * (1 + std::abs(v)));
        }
      }
    }
  }

  TEST_CASE("spike tests reproduce the predicted limits") {
    const auto mv = solve(base, mean_variance(1.0, 2.0));
    const auto r = spike_test(mv, 0.0, 1.0);
    CHECK(r.predicted_limit == Approx(-0.04).epsilon(1e-12));
    CHECK(r.extrapolated_limit == Approx(-0.04).epsilon(1e-6));
    CHECK(r.pass);
    const auto ex = solve(base, ObjectiveSpec(1.0, objective::ExpPenalty{1.0}));
    const auto re = spike_test(ex, 0.0, 1.0);
    CHECK(re.predicted_limit == Approx(-0.036056).epsilon(1e-5));
    CHECK(re.extrapolated_limit == Approx(re.predicted_limit).epsilon(1e-6));
    const auto r0 = spike_test(mv, 0.5, 0.0);
    for (double d : r0.delta_J_over_eps) CHECK(d == 0.0);
    CHECK(r0.pass);
  }

  TEST_CASE("a non-equilibrium control admits a profitable spike") {
    // half the equilibrium loading: the first-order term no longer cancels
    const auto mv = solve(base, mean_variance(1.0, 2.0));
    const auto half = DeterministicControl{[](double) { return 1.875; }, 0.0, {}};
    const double eps = 1.0 / 1024;
    const double gain = evaluate_deterministic(base, mv.objective(), 0.0, 0.0,
                                               DeterministicControl::with_spike(half, 0.0, eps, 1.0)) -
                        evaluate_deterministic(base, mv.objective(), 0.0, 0.0, half);
    // d/d zeta at zeta = 0: kappa B + 2 K D^2 beta = 0.3 - 0.15
    CHECK(gain / eps == Approx(0.15 - 0.04).epsilon(1e-2));
  }

  TEST_CASE("epsilon range") {
    const auto mv = solve(base, mean_variance(1.0, 2.0));
    SpikeOptions bad;
    bad.epsilon_fractions = {0.1, 0.2};
    CHECK_THROWS_AS(spike_test(mv, 0.0, 1.0, bad), Error);
    CHECK_THROWS_AS(spike_test(mv, 1.0, 1.0), Error);
  }

  TEST_CASE("fbsde diagonal") {
    const auto mv = solve(base, mean_variance(1.0, 2.0));
    const auto r = fbsde_diagonal_check(mv, 0.0);
    CHECK(r.Y_tt == Approx(1.0));
    CHECK(r.calY_tt == Approx(-1.5));
    CHECK(r.linear_residual < 1e-14);
    CHECK(r.z_negative);
    const auto ex = solve(base, ObjectiveSpec(1.0, objective::ExpPenalty{1.0}));
    CHECK(fbsde_diagonal_check(ex, 0.0).Z_tt == Approx(-1.80278).epsilon(1e-5));
    const auto zero = solve(base, mean_variance(0.0, 2.0));
    const auto rz = fbsde_diagonal_check(zero, 0.0);
    CHECK(rz.Y_tt == 0.0);
    CHECK(rz.calY_tt == 0.0);
    CHECK(rz.z_negative);
  }

  TEST_CASE("moment pde residuals") {
    const auto mv = solve(base, mean_variance(1.0, 2.0));
    const auto r = pde_residual_check(mv, {1, 2, 3, 4}, {0.0, 0.3, 0.99}, {-1.0, 0.5});
    CHECK(r.scaled_residual[0] <= 1e-6);
    for (double s : r.scaled_residual) CHECK(s <= 1e-5);
    for (double e : r.terminal_error) CHECK(e == 0.0);
    CHECK(raw_moment(mv, 2, 0.0, 1.0) == Approx(std::pow(1.0 + 1.125, 2) + 0.5625));
    CHECK_THROWS_AS(pde_residual_check(mv, {1}, {1.0}, {0.0}), Error);
  }

  TEST_CASE("monte carlo is deterministic and thread-count independent") {
    const auto mv = solve(base, mean_variance(1.0, 2.0));
    McOptions o;
    o.num_paths = 20'000;
    o.num_steps = 64;
    o.threads = 1;
    const McReport a = monte_carlo(mv, o);
    o.threads = 3;
    const McReport b = monte_carlo(mv, o);
    CHECK(a.estimate == b.estimate);
    CHECK(a.all_pass());
    CHECK(a.target[2] == Approx(0.5625));
    CHECK(a.target[4] == Approx(3 * 0.5625 * 0.5625));
    for (int k = 1; k <= 6; ++k) CHECK(a.standard_error[k] > 0.0);
    o.seed = 99;
    CHECK(monte_carlo(mv, o).estimate != a.estimate);
    o.num_paths = 100;
    CHECK_THROWS_AS(monte_carlo(mv, o), Error);
    o.num_paths = 1'000'000'000;
    CHECK_THROWS_AS(monte_carlo(mv, o), Error);
  }

  TEST_CASE("degenerate monte carlo when beta vanishes") {
    const auto zero = solve(base, mean_variance(0.0, 2.0));
    McOptions o;
    o.num_paths = 10'000;
    o.num_steps = 16;
    o.x0 = 1.0;
    const McReport r = monte_carlo(zero, o);
    CHECK(r.estimate[2] == 0.0);
    CHECK(r.all_pass());
  }

  TEST_CASE("thread count resolution") {
    CHECK(resolve_thread_count(3) >= 1);
    ::setenv("EQUICONTROL_THREADS", "1", 1);
    CHECK(resolve_thread_count(8) == 1);
    ::unsetenv("EQUICONTROL_THREADS");
  }
}

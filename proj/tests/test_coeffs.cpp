#include <cmath>

#include "cases.hpp"
#include "doctest.h"
#include "equicontrol/coeffs.hpp"
#include "equicontrol/quadrature.hpp"

using namespace equicontrol;
using doctest::Approx;

TEST_SUITE("coeffs") {
  TEST_CASE("theta for constant coefficients") {
    const CoefficientSet c(cases::constant_paths(), TimeGrid(1.0));
    CHECK(theta(c, 0.0) == Approx(2.25).epsilon(1e-14));
    CHECK(theta(c, 0.5) == Approx(1.125).epsilon(1e-14));
    CHECK(theta(c, 1.0) == 0.0);
    const CoefficientSet c2(cases::constant_paths(0.1), TimeGrid(1.0));
    CHECK(theta(c2, 0.0) == Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("big theta with drift and shift") {
    // A = 0.05, C = 0, F = 0: Theta(0, 2) = 2 e^{0.05}
    const CoefficientSet c({0.05, 0.3, 0.0, 0.2, 0.0}, TimeGrid(1.0));
    CHECK(big_theta(c, 0.0, 2.0) == Approx(2.0 * std::exp(0.05)).epsilon(1e-13));
    CHECK(big_theta(c, 1.0, 2.0) == 2.0);
    // with C and F: shift = int_t^T e^{A(T-s)} (C - B F / D) ds
    const CoefficientSet c3({0.05, 0.3, 0.02, 0.2, 0.05}, TimeGrid(1.0));
    const double k = 0.02 - 0.3 * 0.05 / 0.2;
    CHECK(big_theta(c3, 0.0, 0.0) == Approx(k * std::expm1(0.05) / 0.05).epsilon(1e-12));
    CHECK(big_theta(c3, 0.3, 1.0) ==
          Approx(std::exp(0.05 * 0.7) + k * std::expm1(0.05 * 0.7) / 0.05).epsilon(1e-12));
  }

  TEST_CASE("y from beta") {
    const CoefficientSet c(cases::constant_paths(), TimeGrid(1.0));
    const Eigen::ArrayXd beta = Eigen::ArrayXd::Constant(513, 3.75);
    CHECK(y_from_beta(c, beta, 0.0) == Approx(0.5625).epsilon(1e-14));
    CHECK(y_from_beta(c, beta, 0.5) == Approx(0.28125).epsilon(1e-14));
  }

  TEST_CASE("time-varying theta matches a fine reference") {
    const CoefficientSet c(cases::varying_paths(), TimeGrid(1.0, 64));
    // (B/D)^2 = (0.3 + 0.1 s)^2 / (0.04 e^{0.2 s}); reference by Gauss-Legendre on 200 panels
    const auto rule = gauss_legendre<double>(10);
    double ref = 0.0;
    for (int p = 0; p < 200; ++p)
      for (int i = 0; i < 10; ++i) {
        const double s = (p + 0.5 + 0.5 * rule.nodes[i]) / 200.0;
        ref += 0.5 / 200.0 * rule.weights[i] * std::pow(0.3 + 0.1 * s, 2) / (0.04 * std::exp(0.2 * s));
      }
    CHECK(theta(c, 0.0) == Approx(ref).epsilon(1e-9));
    CHECK(c.log_discount(0.25) == Approx(0.05 * 0.75).epsilon(1e-15));
  }

  TEST_CASE("small D is rejected") {
    CHECK_THROWS_AS(CoefficientSet({0.0, 0.3, 0.0, 1e-12, 0.0}, TimeGrid(1.0)), Error);
    CHECK_THROWS_AS(CoefficientSet({0.0, 0.3, 0.0, ScalarPath::polynomial({-0.5, 1.0}), 0.0}, TimeGrid(1.0, 4)),
                    Error);
  }

  TEST_CASE("quadrature on odd and single-cell spans") {
    const TimeGrid g(1.0, 7);
    const Eigen::ArrayXd f = g.nodes().cube();
    CHECK(integrate(g, f, 0.0, 1.0) == Approx(0.25).epsilon(1e-14));
    CHECK(integrate(g, f, g.node(1), 1.0) == Approx((1.0 - std::pow(g.node(1), 4)) / 4).epsilon(1e-13));
    // a lone cell borrows a neighbour for a quadratic rule
    const Eigen::ArrayXd q = g.nodes().square();
    CHECK(integrate(g, q, g.node(6), 1.0) == Approx((1.0 - std::pow(g.node(6), 3)) / 3).epsilon(1e-13));
    const Eigen::ArrayXd tails = tail_integrals(g, q);
    for (int k = 0; k < g.num_nodes(); ++k)
      CHECK(tails[k] == Approx((1.0 - std::pow(g.node(k), 3)) / 3).epsilon(1e-12));
  }

  TEST_CASE("grid mismatch and domain") {
    const TimeGrid g(1.0, 8);
    CHECK_THROWS_AS(integrate(g, Eigen::ArrayXd::Ones(5), 0.0, 1.0), Error);
    CHECK_THROWS_AS(integrate(g, Eigen::ArrayXd::Ones(9), 0.0, 1.5), Error);
    CHECK_THROWS_AS(TimeGrid(0.0), Error);
  }
}

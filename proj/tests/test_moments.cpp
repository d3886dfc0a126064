#include <cmath>

#include "doctest.h"
#include "equicontrol/moments.hpp"

using namespace equicontrol;
using doctest::Approx;

TEST_SUITE("moments") {
  TEST_CASE("double factorial") {
    CHECK(double_factorial(0) == 1);
    CHECK(double_factorial(-1) == 1);
    CHECK(double_factorial(5) == 15);
    CHECK(double_factorial(8) == 384);
    CHECK_THROWS_AS(double_factorial(40), Error);
  }

  TEST_CASE("alpha") {
    CHECK(alpha(4, 0.5) == Approx(0.75));
    CHECK(alpha(6, 2.0) == Approx(120.0));
    CHECK(alpha(3, 2.0) == 0.0);
    CHECK(alpha(0, 0.0) == 1.0);
    CHECK(alpha(2, 0.0) == 0.0);
    CHECK_THROWS_AS(alpha(2, -0.1), Error);
  }

  TEST_CASE("raw/central round trip") {
    const MomentVector g = MomentVector::gaussian(6, 0.7, 1.3);
    const Eigen::VectorXd raw = central_to_raw(g);
    CHECK(raw[1] == Approx(1.3));
    CHECK(raw[2] == Approx(0.7 + 1.69));
    const MomentVector back = raw_to_central(raw);
    CHECK(back.mean == Approx(1.3));
    for (int k = 2; k <= 6; ++k) CHECK(back.central[k] == Approx(g.central[k]).epsilon(1e-12));
  }

  TEST_CASE("gaussian penalty expectations") {
    CHECK(gaussian_penalty_expectation(penalty::Exp{1.0}, std::log(3.25)) == Approx(0.80278).epsilon(1e-5));
    CHECK(gaussian_penalty_expectation(penalty::Cos{1.0}, 0.2877) == Approx(0.13399).epsilon(1e-4));
    CHECK(gaussian_penalty_expectation(penalty::Cosh{2.0}, 0.5) == Approx(std::expm1(1.0) / 2.0));
    CHECK(gaussian_penalty_expectation(penalty::Exp{1.0}, 0.0) == 0.0);
    const DiscreteLaw law((Eigen::ArrayXd(2) << 1.0, 2.0).finished(), (Eigen::ArrayXd(2) << 0.25, 0.75).finished());
    CHECK(gaussian_penalty_expectation(penalty::Ambiguous{law}, 1.0) ==
          Approx(0.25 * (1 - std::exp(-0.5)) + 0.75 * (1 - std::exp(-2.0))));
  }

  TEST_CASE("fourier density") {
    const int m = 1201;
    const double h_max = 12.0;
    Eigen::ArrayXd s(m);
    for (int i = 0; i < m; ++i) {
      const double h = -h_max + 2 * h_max * i / (m - 1);
      s[i] = -std::exp(-0.5 * h * h) / std::sqrt(2 * M_PI);
    }
    const FourierDensity d(h_max, s, 1.0);
    CHECK(d.is_signed());
    CHECK(d.moment(0) == Approx(0.0).epsilon(1e-12));
    CHECK(d.moment(2) == Approx(-1.0).epsilon(1e-12));
    // E[S(Z)] = 1 - 1/sqrt(1 + v) for S(x) = 1 - exp(-x^2/2)
    CHECK(gaussian_penalty_expectation(penalty::Fourier{d}, 0.8) == Approx(1.0 - 1.0 / std::sqrt(1.8)).epsilon(1e-12));
    // a density that has not decayed at the window edge is rejected
    const FourierDensity flat(1.0, Eigen::ArrayXd::Ones(11));
    CHECK_THROWS_AS(flat.moment(2), Error);
  }

  TEST_CASE("discrete law validation") {
    CHECK_THROWS_AS(DiscreteLaw(Eigen::ArrayXd::Ones(2), Eigen::ArrayXd::Constant(2, 0.4)), Error);
    CHECK_THROWS_AS(DiscreteLaw(Eigen::ArrayXd::Ones(2), (Eigen::ArrayXd(2) << 1.5, -0.5).finished()), Error);
  }
}

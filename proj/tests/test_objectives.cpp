#include <cmath>

#include "cases.hpp"
#include "doctest.h"
#include "equicontrol/objectives.hpp"

using namespace equicontrol;
using doctest::Approx;

TEST_SUITE("objectives") {
  TEST_CASE("validation") {
    CHECK_THROWS_AS(ObjectiveSpec(-1.0, objective::ExpPenalty{1.0}), Error);
    CHECK_THROWS_AS(ObjectiveSpec(1.0, objective::ExpPenalty{0.0}), Error);
    CHECK_THROWS_AS(moment_combo(1.0, cases::weights({0.0, 1.0, 0.0})), Error);  // no positive even weight
    CHECK_THROWS_AS(moment_combo(1.0, cases::weights({-1.0, 0.0, 1.0})), Error);
    CHECK_THROWS_AS(ObjectiveSpec(1.0, objective::StandardizedMoments{cases::weights({0.0, 1.0})}), Error);
    CHECK_NOTHROW(moment_combo(1.0, cases::weights({1.0, -4.0, 1.0})));  // odd weights may be negative
  }

  TEST_CASE("psi for a moment combination") {
    const ObjectiveSpec spec = moment_combo(1.0, cases::weights({2.0, 1.0, 3.0}));
    const MomentVector mv = MomentVector::from_central(0.0, (Eigen::VectorXd(3) << 0.5, 0.1, 0.9).finished());
    CHECK(psi(spec, 0.0, mv) == Approx(-2.0 / 2 * 0.5 + 1.0 / 6 * 0.1 - 3.0 / 24 * 0.9));
    CHECK_THROWS_AS(psi(spec, 0.0, MomentVector::gaussian(3, 0.5)), Error);
  }

  TEST_CASE("curvature sums") {
    CHECK(curvature_sum(mean_variance(1.0, 2.0), 0.0, 0.7) == Approx(-1.0));
    // MVSK: -kappa_2/2 - kappa_4 y / 4
    CHECK(curvature_sum(moment_combo(1.0, cases::weights({1.0, 0.0, 1.0})), 0.0, 0.8) == Approx(-0.5 - 0.2));
    const double y = 0.6;
    CHECK(curvature_sum(ObjectiveSpec(1.0, objective::ExpPenalty{1.0}), 0.0, y) == Approx(-0.5 * std::exp(y / 2)));
    CHECK(curvature_sum(ObjectiveSpec(1.0, objective::CoshPenalty{2.0}), 0.0, y) == Approx(-std::exp(2 * y)));
    CHECK(curvature_sum(ObjectiveSpec(1.0, objective::CosPenalty{1.0}), 0.0, y) == Approx(-0.5 * std::exp(-y / 2)));
    CHECK(curvature_sum(ObjectiveSpec(1.0, objective::StandardizedMoments{cases::weights({2.0, 1.0, 3.0})}), 0.0, y) ==
          Approx(-1.0).epsilon(1e-6));
    CHECK(curvature_sum(ObjectiveSpec(1.0, objective::FourierEvenPenalty{cases::gaussian_bump_density()}), 0.0, y) ==
          Approx(-0.5 * std::pow(1 + y, -1.5)).epsilon(1e-9));
  }

  TEST_CASE("curvature is the y-derivative of the Gaussian psi") {
    for (const auto& c : cases::solved_cases()) {
      CAPTURE(c.name);
      for (double y : {0.0, 0.3, 1.1}) {
        const double h = 1e-5;
        const double lo = y == 0.0 ? 0.0 : y - h;
        const double fd = (psi_gaussian(c.spec, 0.0, y + h) - psi_gaussian(c.spec, 0.0, lo)) / (y + h - lo);
        CHECK(curvature_sum(c.spec, 0.0, y) == Approx(fd).epsilon(1e-4));
      }
    }
  }

  TEST_CASE("penalty series agrees with the closed form on non-Gaussian-tagged vectors") {
    const ObjectiveSpec spec(1.0, objective::ExpPenalty{1.0});
    MomentVector mv = MomentVector::gaussian(ObjectiveSpec::kSeriesOrder, 0.4);
    const double closed = psi(spec, 0.0, mv);
    mv.gaussian_variance.reset();
    CHECK(psi(spec, 0.0, mv) == Approx(closed).epsilon(1e-12));
    CHECK(closed == Approx(-std::expm1(0.2)));
  }

  TEST_CASE("gradient") {
    const PsiGradient g = psi_grad_even(moment_combo(1.0, cases::weights({2.0, 0.0, 24.0})), 0.0, 0.3);
    CHECK(g[1] == Approx(-1.0));
    CHECK(g[2] == Approx(-1.0));
  }
}

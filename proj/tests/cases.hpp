#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "equicontrol/equilibrium.hpp"

namespace cases {

using namespace equicontrol;

struct SolvedCase {
  std::string name;
  ModelPaths paths;
  ObjectiveSpec spec;
  SolverKind solver;
  double horizon = 1.0;

  CoefficientSet coeffs(int steps = 512) const { return CoefficientSet(paths, TimeGrid(horizon, steps)); }
  EquilibriumSolution solve(int steps = 512) const { return equicontrol::solve(coeffs(steps), spec, solver); }
};

inline ModelPaths constant_paths(double b = 0.3, double d = 0.2) { return {0.0, b, 0.0, d, 0.0}; }

inline ModelPaths varying_paths() {
  return {0.05, ScalarPath::polynomial({0.3, 0.1}), 0.02, ScalarPath::exponential(0.2, 0.1), 0.05};
}

inline Eigen::VectorXd weights(std::initializer_list<double> from_order_2) {
  Eigen::VectorXd k = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(from_order_2.size()) + 2);
  Eigen::Index j = 2;
  for (double w : from_order_2) k[j++] = w;
  return k;
}

/// sigma = -N(0,1) density with unit atom: S(x) = 1 - exp(-x^2/2)
inline FourierDensity gaussian_bump_density(double h_max = 12.0, int samples = 1201) {
  Eigen::ArrayXd s(samples);
  for (int i = 0; i < samples; ++i) {
    const double h = -h_max + 2.0 * h_max * i / (samples - 1);
    s[i] = -std::exp(-0.5 * h * h) / std::sqrt(2.0 * std::numbers::pi);
  }
  return FourierDensity(h_max, s, 1.0);
}

inline ObjectiveSpec random_combo(std::mt19937_64& rng, int order, double kappa = 1.0) {
  std::uniform_real_distribution<double> even(0.0, 5.0), odd(-3.0, 3.0);
  Eigen::VectorXd k = Eigen::VectorXd::Zero(order + 1);
  for (int j = 2; j <= order; ++j) k[j] = j % 2 == 0 ? even(rng) : odd(rng);
  if (k[2] < 0.05) k[2] += 0.05;
  return moment_combo(kappa, k);
}

inline std::vector<SolvedCase> solved_cases() {
  std::mt19937_64 rng(7);
  const DiscreteLaw law((Eigen::ArrayXd(3) << 1.0, 2.0, 3.0).finished(), Eigen::ArrayXd::Constant(3, 1.0 / 3.0));
  return {
      {"mean_variance", constant_paths(), mean_variance(1.0, 2.0), SolverKind::ClosedForm},
      {"mvsk", constant_paths(), moment_combo(1.0, weights({1.0, 0.0, 1.0})), SolverKind::ClosedForm},
      {"exp_penalty", constant_paths(), ObjectiveSpec(1.0, objective::ExpPenalty{1.0}), SolverKind::ClosedForm},
      {"cosh_penalty", constant_paths(), ObjectiveSpec(1.0, objective::CoshPenalty{1.0}), SolverKind::ClosedForm},
      {"cos_penalty", constant_paths(0.1), ObjectiveSpec(1.0, objective::CosPenalty{1.0}), SolverKind::ClosedForm},
      {"ambiguous_cos", constant_paths(), ObjectiveSpec(1.0, objective::AmbiguousCos{law}), SolverKind::ClosedForm},
      {"standardized", constant_paths(), ObjectiveSpec(1.0, objective::StandardizedMoments{weights({2.0, 1.0})}),
       SolverKind::Ode},
      {"combo_n8", constant_paths(), random_combo(rng, 8), SolverKind::Algebraic},
      {"fourier_bump", constant_paths(0.1), ObjectiveSpec(1.0, objective::FourierEvenPenalty{gaussian_bump_density()}),
       SolverKind::Ode},
      {"varying_mv", varying_paths(), mean_variance(1.0, 2.0), SolverKind::ClosedForm},
      {"varying_exp", varying_paths(), ObjectiveSpec(1.0, objective::ExpPenalty{1.0}), SolverKind::ClosedForm},
  };
}

}  // namespace cases

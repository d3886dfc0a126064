#pragma once

#include <Eigen/Core>

#include <string>
#include <variant>
#include <vector>

namespace equicontrol {

/// Deterministic scalar function of time on [0, T]. Closed-form descriptors
/// and piecewise-linear samples both expose pointwise values and exact
/// integrals.
class ScalarPath {
 public:
  struct Constant {
    double value = 0.0;
  };
  /// sum_i coefficients[i] * t^i
  struct Polynomial {
    std::vector<double> coefficients;
  };
  /// scale * exp(rate * t)
  struct Exponential {
    double scale = 1.0;
    double rate = 0.0;
  };
  /// values at t_k = k * horizon / (values.size() - 1), linear in between
  struct Sampled {
    double horizon = 1.0;
    Eigen::ArrayXd values;
  };
  using Descriptor = std::variant<Constant, Polynomial, Exponential, Sampled>;

  ScalarPath() : descriptor_(Constant{}) {}
  ScalarPath(double constant) : descriptor_(Constant{constant}) {}  // NOLINT: implicit by intent
  explicit ScalarPath(Descriptor descriptor);

  static ScalarPath constant(double value) { return ScalarPath(Constant{value}); }
  static ScalarPath polynomial(std::vector<double> coefficients) { return ScalarPath(Polynomial{std::move(coefficients)}); }
  static ScalarPath exponential(double scale, double rate) { return ScalarPath(Exponential{scale, rate}); }
  static ScalarPath sampled(double horizon, Eigen::ArrayXd values) { return ScalarPath(Sampled{horizon, std::move(values)}); }

  double operator()(double t) const;
  /// Exact integral over [a, b].
  double integral(double a, double b) const;

  /// True when the path is identically zero.
  bool is_zero() const;
  std::string kind() const;
  const Descriptor& descriptor() const { return descriptor_; }

 private:
  Descriptor descriptor_;
  Eigen::ArrayXd cumulative_;  // running trapezoid sums for Sampled
};

}  // namespace equicontrol

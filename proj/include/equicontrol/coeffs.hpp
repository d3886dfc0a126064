#pragma once

#include <Eigen/Core>

#include "equicontrol/grid.hpp"
#include "equicontrol/path.hpp"
#include "equicontrol/quadrature.hpp"

namespace equicontrol {

/// Coefficient paths of dX = (A X + B u + C) ds + (D u + F) dW.
struct ModelPaths {
  ScalarPath a, b, c, d, f;
};

/// exp(int_t^T A) and its square at the grid nodes.
struct DiscountCache {
  Eigen::ArrayXd discount;
  Eigen::ArrayXd discount_sq;
};

/// Model coefficients bound to a solver grid, with the time-integral tables
/// every solver and check needs. Immutable after construction.
class CoefficientSet {
 public:
  static constexpr double kDefaultDMin = 1e-10;

  CoefficientSet(ModelPaths paths, TimeGrid grid, double d_min = kDefaultDMin);

  const TimeGrid& grid() const { return grid_; }
  const ModelPaths& paths() const { return paths_; }
  double horizon() const { return grid_.horizon(); }
  double d_min() const { return d_min_; }

  double a(double t) const { return paths_.a(t); }
  double b(double t) const { return paths_.b(t); }
  double c(double t) const { return paths_.c(t); }
  double f(double t) const { return paths_.f(t); }
  /// Throws a domain error when |D_t| < d_min.
  double d(double t) const;

  /// (B_t / D_t)^2
  double price_of_risk_sq(double t) const;
  /// int_t^T A_v dv (exact for every path kind)
  double log_discount(double t) const;
  double discount(double t) const;
  /// theta_t = int_t^T (B/D)^2 ds; tabulated at nodes, Hermite in between.
  double theta(double t) const;
  /// int_t^T exp(int_s^T A) (C_s - B_s F_s / D_s) ds
  double drift_shift(double t) const;

  const Eigen::ArrayXd& theta_nodes() const { return theta_; }
  const DiscountCache& discount_cache() const { return discount_; }
  bool b_is_zero() const { return paths_.b.is_zero(); }

 private:
  ModelPaths paths_;
  TimeGrid grid_;
  double d_min_;
  Eigen::ArrayXd theta_, theta_rate_;
  Eigen::ArrayXd shift_, shift_rate_;
  DiscountCache discount_;
};

double theta(const CoefficientSet& coeffs, double t);

/// Theta(t, x) = x exp(int_t^T A) + drift_shift(t)
double big_theta(const CoefficientSet& coeffs, double t, double x);

/// y_t = int_t^T (D_s beta_s)^2 ds for beta sampled on the coefficient grid.
double y_from_beta(const CoefficientSet& coeffs, const Eigen::ArrayXd& beta, double t);

}  // namespace equicontrol

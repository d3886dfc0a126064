#include "equicontrol/coeffs.hpp"

#include <cmath>
#include <string>

namespace equicontrol {

CoefficientSet::CoefficientSet(ModelPaths paths, TimeGrid grid, double d_min)
    : paths_(std::move(paths)), grid_(grid), d_min_(d_min) {
  if (!(d_min > 0.0)) throw Error(ErrorKind::Domain, "d_min must be positive");
  const int n = grid_.num_nodes();
  const double h = grid_.step();

  // |D| is checked at nodes and midpoints; d() re-checks at every evaluation.
  for (int k = 0; k < 2 * grid_.num_steps() + 1; ++k) {
    const double t = std::min(0.5 * k * h, grid_.horizon());
    const double dv = paths_.d(t);
    if (!std::isfinite(dv) || std::abs(dv) < d_min_)
      throw Error(ErrorKind::Domain, "|D| below d_min at t=" + std::to_string(t));
    for (double v : {paths_.a(t), paths_.b(t), paths_.c(t), paths_.f(t)})
      if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "non-finite coefficient at t=" + std::to_string(t));
  }

  theta_rate_.resize(n);
  shift_rate_.resize(n);
  discount_.discount.resize(n);
  discount_.discount_sq.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = grid_.node(k);
    const double disc = std::exp(log_discount(t));
    discount_.discount[k] = disc;
    discount_.discount_sq[k] = disc * disc;
    theta_rate_[k] = price_of_risk_sq(t);
    shift_rate_[k] = disc * (c(t) - b(t) * f(t) / d(t));
  }
  theta_ = tail_integrals(grid_, theta_rate_);
  shift_ = tail_integrals(grid_, shift_rate_);
}

double CoefficientSet::d(double t) const {
  const double dv = paths_.d(t);
  if (!(std::abs(dv) >= d_min_)) throw Error(ErrorKind::Domain, "|D| below d_min at t=" + std::to_string(t));
  return dv;
}

double CoefficientSet::price_of_risk_sq(double t) const {
  const double ratio = b(t) / d(t);
  return ratio * ratio;
}

double CoefficientSet::log_discount(double t) const { return paths_.a.integral(t, grid_.horizon()); }

double CoefficientSet::discount(double t) const { return std::exp(log_discount(t)); }

double CoefficientSet::theta(double t) const {
  grid_.require_contains(t);
  return hermite(grid_, theta_, -theta_rate_, grid_.clamp(t));
}

double CoefficientSet::drift_shift(double t) const {
  grid_.require_contains(t);
  return hermite(grid_, shift_, -shift_rate_, grid_.clamp(t));
}

double theta(const CoefficientSet& coeffs, double t) { return coeffs.theta(t); }

double big_theta(const CoefficientSet& coeffs, double t, double x) {
  coeffs.grid().require_contains(t);
  return x * coeffs.discount(t) + coeffs.drift_shift(t);
}

double y_from_beta(const CoefficientSet& coeffs, const Eigen::ArrayXd& beta, double t) {
  const TimeGrid& grid = coeffs.grid();
  if (beta.size() != grid.num_nodes()) throw Error(ErrorKind::GridMismatch, "beta is not sampled on the coefficient grid");
  Eigen::ArrayXd integrand(grid.num_nodes());
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double v = coeffs.d(grid.node(k)) * beta[k];
    integrand[k] = v * v;
  }
  return integrate(grid, integrand, t, grid.horizon());
}

}  // namespace equicontrol

#pragma once

// Quadrature and interpolation primitives on uniform grids, plus Gauss rules
// built with the Golub-Welsch eigenvalue method.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "equicontrol/error.hpp"
#include "equicontrol/grid.hpp"

namespace equicontrol {

namespace detail {

// Integral over nodes [i, j] of the sampled function, exact for quadratics.
template <typename Derived>
typename Derived::Scalar nodal_integral(const Eigen::DenseBase<Derived>& f, int i, int j, double h) {
  using Scalar = typename Derived::Scalar;
  const int cells = j - i;
  if (cells <= 0) return Scalar(0);
  const int last = static_cast<int>(f.size()) - 1;
  if (cells == 1) {
    // three-point rule borrowing the neighbour
    if (j + 1 <= last) return h * (Scalar(5) * f(i) + Scalar(8) * f(j) - f(j + 1)) / Scalar(12);
    return h * (-f(i - 1) + Scalar(8) * f(i) + Scalar(5) * f(j)) / Scalar(12);
  }
  Scalar sum(0);
  int start = i;
  if (cells % 2 == 1) {
    sum += Scalar(3) * h / Scalar(8) * (f(i) + Scalar(3) * f(i + 1) + Scalar(3) * f(i + 2) + f(i + 3));
    start = i + 3;
  }
  for (int k = start; k + 2 <= j; k += 2) sum += h / Scalar(3) * (f(k) + Scalar(4) * f(k + 1) + f(k + 2));
  return sum;
}

}  // namespace detail

/// Integral of grid samples over [a, b] in [0, T]. Whole cells use composite
/// Simpson (3/8 rule for an odd leftover); partial cells at the ends use the
/// trapezoid rule on the linear interpolant.
template <typename Derived>
typename Derived::Scalar integrate(const TimeGrid& grid, const Eigen::DenseBase<Derived>& f, double a, double b) {
  using Scalar = typename Derived::Scalar;
  if (f.size() != grid.num_nodes()) throw Error(ErrorKind::GridMismatch, "sample count does not match grid");
  grid.require_contains(a, "a");
  grid.require_contains(b, "b");
  if (a > b) throw Error(ErrorKind::Domain, "integrate requires a <= b");
  a = grid.clamp(a);
  b = grid.clamp(b);
  const double h = grid.step();

  auto lerp = [&](double t) {
    const int k = grid.cell(t);
    const double w = (t - grid.node(k)) / h;
    return Scalar(1 - w) * f(k) + Scalar(w) * f(k + 1);
  };

  int ia = grid.node_index(a);
  int ib = grid.node_index(b);
  const int first = ia >= 0 ? ia : grid.cell(a) + 1;
  const int last = ib >= 0 ? ib : grid.cell(b);
  if (first > last) return Scalar(0.5 * (b - a)) * (lerp(a) + lerp(b));

  Scalar sum = detail::nodal_integral(f, first, last, h);
  if (ia < 0) sum += Scalar(0.5 * (grid.node(first) - a)) * (lerp(a) + f(first));
  if (ib < 0) sum += Scalar(0.5 * (b - grid.node(last))) * (f(last) + lerp(b));
  return sum;
}

/// G_k = integral over [t_k, T] for every node, with the same rules as integrate().
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> tail_integrals(const TimeGrid& grid,
                                                                        const Eigen::DenseBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  if (f.size() != grid.num_nodes()) throw Error(ErrorKind::GridMismatch, "sample count does not match grid");
  const int n = grid.num_steps();
  const double h = grid.step();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> tail(n + 1);
  tail(n) = Scalar(0);
  for (int k = n - 2; k >= 0; k -= 2) tail(k) = tail(k + 2) + h / Scalar(3) * (f(k) + Scalar(4) * f(k + 1) + f(k + 2));
  tail(n - 1) = detail::nodal_integral(f, n - 1, n, h);
  for (int k = n - 3; k >= 0; k -= 2)
    tail(k) = tail(k + 3) + Scalar(3) * h / Scalar(8) * (f(k) + Scalar(3) * f(k + 1) + Scalar(3) * f(k + 2) + f(k + 3));
  return tail;
}

/// Cubic Hermite interpolation of nodal values and derivatives at any t.
template <typename DerivedV, typename DerivedD>
typename DerivedV::Scalar hermite(const TimeGrid& grid, const Eigen::DenseBase<DerivedV>& values,
                                  const Eigen::DenseBase<DerivedD>& derivs, double t) {
  const int node = grid.node_index(t);
  if (node >= 0) return values(node);
  const int k = grid.cell(t);
  const double h = grid.step();
  const double s = (t - grid.node(k)) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * values(k) + h10 * h * derivs(k) + h01 * values(k + 1) + h11 * h * derivs(k + 1);
}

template <typename Scalar>
struct GaussRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

namespace detail {

template <typename Scalar>
GaussRule<Scalar> golub_welsch(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& off_diagonal, Scalar mu0) {
  const Eigen::Index n = off_diagonal.size() + 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> jacobi = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) jacobi(i, i + 1) = jacobi(i + 1, i) = off_diagonal(i);
  Eigen::SelfAdjointEigenSolver<decltype(jacobi)> solver(jacobi);
  GaussRule<Scalar> rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square().matrix();
  return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1].
template <typename Scalar = double>
GaussRule<Scalar> gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::Domain, "Gauss rule needs at least one node");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> beta(n - 1);
  for (int k = 1; k < n; ++k) beta(k - 1) = Scalar(k) / std::sqrt(Scalar(4 * k * k - 1));
  return detail::golub_welsch<Scalar>(beta, Scalar(2));
}

/// n-point Gauss-Hermite rule for the weight exp(-x^2) on the real line.
template <typename Scalar = double>
GaussRule<Scalar> gauss_hermite(int n) {
  if (n < 1) throw Error(ErrorKind::Domain, "Gauss rule needs at least one node");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> beta(n - 1);
  for (int k = 1; k < n; ++k) beta(k - 1) = std::sqrt(Scalar(k) / Scalar(2));
  return detail::golub_welsch<Scalar>(beta, std::sqrt(std::numbers::pi_v<Scalar>));
}

/// E[g(Z)] for Z ~ N(0, variance) with an n-point Gauss-Hermite rule.
template <typename Scalar, typename Fn>
Scalar gaussian_expectation(const GaussRule<Scalar>& rule, Scalar variance, Fn&& g) {
  const Scalar scale = std::sqrt(Scalar(2) * variance);
  Scalar sum(0);
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights(i) * g(scale * rule.nodes(i));
  return sum / std::sqrt(std::numbers::pi_v<Scalar>);
}

}  // namespace equicontrol

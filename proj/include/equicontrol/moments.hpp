#pragma once

// Gaussian moment calculus and penalty expectations under centred normal laws.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>

#include "equicontrol/error.hpp"

namespace equicontrol {

/// k!! as an exact integer; (-1)!! = 0!! = 1. Throws Overflow for k > 33.
std::uint64_t double_factorial(int k);

/// k!! in floating point, valid for any k >= -1.
double double_factorial_fp(int k);

/// alpha_j(y): j-th central moment of N(0, y). Zero for odd j, (j-1)!! y^{j/2} otherwise.
template <typename Scalar>
Scalar alpha(int j, Scalar y) {
  if (y < Scalar(0)) throw Error(ErrorKind::Domain, "alpha requires y >= 0");
  if (j < 0) throw Error(ErrorKind::Domain, "alpha requires j >= 0");
  if (j % 2 == 1) return Scalar(0);
  Scalar value(1);
  for (int i = j - 1; i > 0; i -= 2) value *= Scalar(i) * y;
  return j == 0 ? Scalar(1) : value;
}

/// Conditional mean plus central moments of orders 2..n.
/// central(k) holds the order-k central moment; central(0) = 1, central(1) = 0.
struct MomentVector {
  double mean = 0.0;
  Eigen::VectorXd central;
  /// Set when the vector is the exact moment vector of N(mean, y).
  std::optional<double> gaussian_variance;

  int order() const { return static_cast<int>(central.size()) - 1; }

  static MomentVector gaussian(int n, double y, double mean = 0.0);
  /// central_2_to_n holds orders 2..n in sequence.
  static MomentVector from_central(double mean, const Eigen::VectorXd& central_2_to_n);
};

/// Raw moments E[Z^i], index = order, raw(0) = 1.
Eigen::VectorXd central_to_raw(const MomentVector& mv);

/// Inverse of central_to_raw; raw(0) must be 1 and raw.size() >= 3.
MomentVector raw_to_central(const Eigen::VectorXd& raw);

/// Finite law {(h_i, p_i)} with positive weights summing to one.
class DiscreteLaw {
 public:
  DiscreteLaw(Eigen::ArrayXd support, Eigen::ArrayXd weights);

  const Eigen::ArrayXd& support() const { return support_; }
  const Eigen::ArrayXd& weights() const { return weights_; }

  template <typename Fn>
  double expect(Fn&& g) const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < support_.size(); ++i) sum += weights_[i] * g(support_[i]);
    return sum;
  }
  /// E[H^k]
  double moment(int k) const;

 private:
  Eigen::ArrayXd support_, weights_;
};

/// Signed spectral density sigma(h) = S^(h) / 2pi of an even penalty
/// S(x) = atom + int sigma(h) cos(h x) dh. The samples live on the symmetric
/// uniform grid h_i = -h_max + i * 2 h_max / (M - 1) with M odd.
class FourierDensity {
 public:
  FourierDensity(double h_max, Eigen::ArrayXd samples, double atom = 0.0);

  double h_max() const { return h_max_; }
  const Eigen::ArrayXd& samples() const { return samples_; }
  double atom() const { return atom_; }
  double node(Eigen::Index i) const;
  /// True when some sample is negative (reported, not rejected).
  bool is_signed() const { return (samples_ < 0.0).any(); }

  /// int sigma(h) g(h) dh by composite Simpson. Throws a quadrature error
  /// when the integrand has not decayed at the window edges.
  template <typename Fn>
  double integrate(Fn&& g) const {
    const Eigen::Index m = samples_.size();
    const double dh = 2.0 * h_max_ / static_cast<double>(m - 1);
    Eigen::ArrayXd values(m);
    for (Eigen::Index i = 0; i < m; ++i) values[i] = samples_[i] * g(node(i));
    if (!values.allFinite()) throw Error(ErrorKind::Quadrature, "Fourier density integrand is not finite");
    const double scale = values.abs().maxCoeff();
    const double edge = std::max(std::abs(values[0]), std::abs(values[m - 1]));
    if (scale > 0.0 && edge > kEdgeTolerance * scale)
      throw Error(ErrorKind::Quadrature, "Fourier density integral does not converge on the truncation window");
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 2 < m; i += 2) sum += dh / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    return sum;
  }
  /// mu_k = int sigma(h) h^k dh (+ atom for k = 0)
  double moment(int k) const;

  static constexpr double kEdgeTolerance = 1e-8;

 private:
  double h_max_;
  Eigen::ArrayXd samples_;
  double atom_;
};

namespace penalty {
/// S(x) = (exp(-c x) - 1) / c  (odd part has zero Gaussian mean)
struct Exp {
  double c;
};
/// S(x) = (cosh(c x) - 1) / c
struct Cosh {
  double c;
};
/// S(x) = (1 - cos(c x)) / c
struct Cos {
  double c;
};
/// S(x) = 1 - E[cos(H x)]
struct Ambiguous {
  DiscreteLaw law;
};
/// S(x) = atom + int sigma(h) cos(h x) dh
struct Fourier {
  FourierDensity density;
};
}  // namespace penalty

using PenaltyDescriptor = std::variant<penalty::Exp, penalty::Cosh, penalty::Cos, penalty::Ambiguous, penalty::Fourier>;

/// E[S(Z)] for Z ~ N(0, variance).
double gaussian_penalty_expectation(const PenaltyDescriptor& penalty, double variance);

}  // namespace equicontrol

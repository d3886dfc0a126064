#include "equicontrol/moments.hpp"

#include <cmath>

namespace equicontrol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double binomial(int n, int k) {
  double value = 1.0;
  for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

}  // namespace

std::uint64_t double_factorial(int k) {
  if (k < -1) throw Error(ErrorKind::Domain, "double factorial requires k >= -1");
  if (k > 33) throw Error(ErrorKind::Overflow, "k!! exceeds 64-bit range for k > 33; use double_factorial_fp");
  std::uint64_t value = 1;
  for (int i = k; i > 1; i -= 2) value *= static_cast<std::uint64_t>(i);
  return value;
}

double double_factorial_fp(int k) {
  if (k < -1) throw Error(ErrorKind::Domain, "double factorial requires k >= -1");
  double value = 1.0;
  for (int i = k; i > 1; i -= 2) value *= i;
  return value;
}

MomentVector MomentVector::gaussian(int n, double y, double mean) {
  if (n < 2) throw Error(ErrorKind::IncompatibleOrder, "moment vectors need order >= 2");
  MomentVector mv;
  mv.mean = mean;
  mv.central.resize(n + 1);
  for (int j = 0; j <= n; ++j) mv.central[j] = alpha(j, y);
  mv.gaussian_variance = y;
  return mv;
}

MomentVector MomentVector::from_central(double mean, const Eigen::VectorXd& central_2_to_n) {
  if (central_2_to_n.size() < 1) throw Error(ErrorKind::IncompatibleOrder, "moment vectors need order >= 2");
  if (central_2_to_n[0] < 0.0) throw Error(ErrorKind::Domain, "second central moment must be nonnegative");
  MomentVector mv;
  mv.mean = mean;
  mv.central.resize(central_2_to_n.size() + 2);
  mv.central << 1.0, 0.0, central_2_to_n;
  return mv;
}

Eigen::VectorXd central_to_raw(const MomentVector& mv) {
  const int n = mv.order();
  Eigen::VectorXd raw(n + 1);
  for (int i = 0; i <= n; ++i) {
    double sum = 0.0;
    for (int k = 0; k <= i; ++k) sum += binomial(i, k) * std::pow(mv.mean, i - k) * mv.central[k];
    raw[i] = sum;
  }
  return raw;
}

MomentVector raw_to_central(const Eigen::VectorXd& raw) {
  if (raw.size() < 3) throw Error(ErrorKind::IncompatibleOrder, "raw moment list needs orders 0..n with n >= 2");
  const int n = static_cast<int>(raw.size()) - 1;
  MomentVector mv;
  mv.mean = raw[1];
  mv.central.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    double sum = 0.0;
    for (int j = 0; j <= i; ++j) sum += binomial(i, j) * std::pow(-mv.mean, j) * raw[i - j];
    mv.central[i] = sum;
  }
  mv.central[0] = 1.0;
  mv.central[1] = 0.0;
  return mv;
}

DiscreteLaw::DiscreteLaw(Eigen::ArrayXd support, Eigen::ArrayXd weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() == 0 || support_.size() != weights_.size())
    throw Error(ErrorKind::Domain, "discrete law needs matching, nonempty support and weights");
  if (!support_.allFinite() || !weights_.allFinite() || (weights_ <= 0.0).any())
    throw Error(ErrorKind::Domain, "discrete law weights must be positive and finite");
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "discrete law weights must sum to one");
}

double DiscreteLaw::moment(int k) const {
  return expect([k](double h) { return std::pow(h, k); });
}

FourierDensity::FourierDensity(double h_max, Eigen::ArrayXd samples, double atom)
    : h_max_(h_max), samples_(std::move(samples)), atom_(atom) {
  if (!(h_max_ > 0.0)) throw Error(ErrorKind::Domain, "Fourier window half-width must be positive");
  if (samples_.size() < 3 || samples_.size() % 2 == 0)
    throw Error(ErrorKind::Domain, "Fourier density needs an odd number (>= 3) of samples");
  if (!samples_.allFinite() || !std::isfinite(atom_)) throw Error(ErrorKind::Domain, "Fourier density is not finite");
}

double FourierDensity::node(Eigen::Index i) const {
  return -h_max_ + 2.0 * h_max_ * static_cast<double>(i) / static_cast<double>(samples_.size() - 1);
}

double FourierDensity::moment(int k) const {
  const double continuous = integrate([k](double h) { return std::pow(h, k); });
  return k == 0 ? continuous + atom_ : continuous;
}

double gaussian_penalty_expectation(const PenaltyDescriptor& penalty, double variance) {
  if (!(variance >= 0.0)) throw Error(ErrorKind::Domain, "variance must be nonnegative");
  return std::visit(
      Overloaded{
          [variance](const penalty::Exp& p) { return std::expm1(0.5 * p.c * p.c * variance) / p.c; },
          [variance](const penalty::Cosh& p) { return std::expm1(0.5 * p.c * p.c * variance) / p.c; },
          [variance](const penalty::Cos& p) { return -std::expm1(-0.5 * p.c * p.c * variance) / p.c; },
          [variance](const penalty::Ambiguous& p) {
            return p.law.expect([variance](double h) { return -std::expm1(-0.5 * h * h * variance); });
          },
          [variance](const penalty::Fourier& p) {
            const auto& density = p.density;
            return density.atom() + density.integrate([variance](double h) { return std::exp(-0.5 * h * h * variance); });
          },
      },
      penalty);
}

}  // namespace equicontrol

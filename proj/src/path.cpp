#include "equicontrol/path.hpp"

#include <algorithm>
#include <cmath>

#include "equicontrol/error.hpp"

namespace equicontrol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double sampled_antiderivative(const ScalarPath::Sampled& s, const Eigen::ArrayXd& cumulative, double t) {
  const auto cells = static_cast<int>(s.values.size()) - 1;
  const double h = s.horizon / cells;
  t = std::clamp(t, 0.0, s.horizon);
  const int k = std::min(static_cast<int>(std::floor(t / h)), cells - 1);
  const double sum = cumulative[k];
  const double dt = t - k * h;
  const double slope = (s.values[k + 1] - s.values[k]) / h;
  return sum + s.values[k] * dt + 0.5 * slope * dt * dt;
}

}  // namespace

ScalarPath::ScalarPath(Descriptor descriptor) : descriptor_(std::move(descriptor)) {
  std::visit(Overloaded{
                 [](const Constant& c) {
                   if (!std::isfinite(c.value)) throw Error(ErrorKind::Domain, "constant path is not finite");
                 },
                 [](const Polynomial& p) {
                   for (double c : p.coefficients)
                     if (!std::isfinite(c)) throw Error(ErrorKind::Domain, "polynomial coefficient is not finite");
                 },
                 [](const Exponential& e) {
                   if (!std::isfinite(e.scale) || !std::isfinite(e.rate))
                     throw Error(ErrorKind::Domain, "exponential path parameters are not finite");
                 },
                 [](const Sampled& s) {
                   if (s.values.size() < 2) throw Error(ErrorKind::Domain, "sampled path needs at least two values");
                   if (!(s.horizon > 0.0)) throw Error(ErrorKind::Domain, "sampled path horizon must be positive");
                   if (!s.values.allFinite()) throw Error(ErrorKind::Domain, "sampled path has non-finite values");
                 },
             },
             descriptor_);
  if (const auto* s = std::get_if<Sampled>(&descriptor_)) {
    const auto cells = static_cast<int>(s->values.size()) - 1;
    const double h = s->horizon / cells;
    cumulative_.resize(cells + 1);
    cumulative_[0] = 0.0;
    for (int i = 0; i < cells; ++i) cumulative_[i + 1] = cumulative_[i] + 0.5 * h * (s->values[i] + s->values[i + 1]);
  }
}

double ScalarPath::operator()(double t) const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value; },
                        [t](const Polynomial& p) {
                          double v = 0.0;
                          for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) v = v * t + *it;
                          return v;
                        },
                        [t](const Exponential& e) { return e.scale * std::exp(e.rate * t); },
                        [t](const Sampled& s) {
                          const auto cells = static_cast<int>(s.values.size()) - 1;
                          const double h = s.horizon / cells;
                          const double tc = std::clamp(t, 0.0, s.horizon);
                          const int k = std::min(static_cast<int>(std::floor(tc / h)), cells - 1);
                          const double w = (tc - k * h) / h;
                          return (1 - w) * s.values[k] + w * s.values[k + 1];
                        },
                    },
                    descriptor_);
}

double ScalarPath::integral(double a, double b) const {
  return std::visit(Overloaded{
                        [=](const Constant& c) { return c.value * (b - a); },
                        [=](const Polynomial& p) {
                          double fa = 0.0, fb = 0.0;
                          for (int i = static_cast<int>(p.coefficients.size()) - 1; i >= 0; --i) {
                            const double c = p.coefficients[i] / (i + 1);
                            fa = fa * a + c;
                            fb = fb * b + c;
                          }
                          return fb * b - fa * a;
                        },
                        [=](const Exponential& e) {
                          if (e.rate == 0.0) return e.scale * (b - a);
                          // expm1 keeps short intervals accurate
                          return e.scale * std::exp(e.rate * a) * std::expm1(e.rate * (b - a)) / e.rate;
                        },
                        [&](const Sampled& s) { return sampled_antiderivative(s, cumulative_, b) - sampled_antiderivative(s, cumulative_, a); },
                    },
                    descriptor_);
}

bool ScalarPath::is_zero() const {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value == 0.0; },
                        [](const Polynomial& p) {
                          return std::all_of(p.coefficients.begin(), p.coefficients.end(), [](double c) { return c == 0.0; });
                        },
                        [](const Exponential& e) { return e.scale == 0.0; },
                        [](const Sampled& s) { return (s.values == 0.0).all(); },
                    },
                    descriptor_);
}

std::string ScalarPath::kind() const {
  return std::visit(Overloaded{
                        [](const Constant&) { return std::string("constant"); },
                        [](const Polynomial&) { return std::string("polynomial"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Sampled&) { return std::string("sampled"); },
                    },
                    descriptor_);
}

}  // namespace equicontrol

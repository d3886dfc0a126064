#include "equicontrol/objectives.hpp"

#include <cmath>

namespace equicontrol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double factorial(int k) {
  double value = 1.0;
  for (int i = 2; i <= k; ++i) value *= i;
  return value;
}

double sign_pow(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

void validate_kappas(const Eigen::VectorXd& kappas, const char* family) {
  if (kappas.size() < 3) throw Error(ErrorKind::Domain, std::string(family) + " needs order n >= 2");
  if (!kappas.allFinite()) throw Error(ErrorKind::Domain, std::string(family) + " weights must be finite");
}

/// Coefficient s_k of the penalty series E[S(Z)] = sum_k s_k M_k.
double penalty_series_coefficient(const ObjectiveVariant& variant, int k) {
  return std::visit(Overloaded{
                        [k](const objective::ExpPenalty& p) { return sign_pow(k) * std::pow(p.c, k - 1) / factorial(k); },
                        [k](const objective::CoshPenalty& p) {
                          return k % 2 == 0 ? std::pow(p.c, k - 1) / factorial(k) : 0.0;
                        },
                        [k](const objective::CosPenalty& p) {
                          return k % 2 == 0 ? -sign_pow(k / 2) * std::pow(p.c, k - 1) / factorial(k) : 0.0;
                        },
                        [k](const objective::AmbiguousCos& p) {
                          return k % 2 == 0 ? -sign_pow(k / 2) * p.law.moment(k) / factorial(k) : 0.0;
                        },
                        [k](const objective::FourierEvenPenalty& p) {
                          return k % 2 == 0 ? sign_pow(k / 2) * p.density.moment(k) / factorial(k) : 0.0;
                        },
                        [](const auto&) -> double { throw Error(ErrorKind::UnsupportedVariant, "not a penalty family"); },
                    },
                    variant);
}

MomentVector untagged_gaussian(int n, double y) {
  MomentVector mv = MomentVector::gaussian(n, y);
  mv.gaussian_variance.reset();
  return mv;
}

bool uses_finite_differences(const ObjectiveSpec& spec) {
  return std::holds_alternative<objective::StandardizedMoments>(spec.variant()) ||
         std::holds_alternative<objective::FourierEvenPenalty>(spec.variant());
}

/// psi_{z_{2j}} at alpha(y) by central differences of psi.
double fd_even_component(const ObjectiveSpec& spec, double t, double y, int j) {
  const int slot = 2 * j;
  MomentVector mv = untagged_gaussian(spec.order(), y);
  const double z = mv.central[slot];
  double h = fd_step(z);
  // the standardized terms are singular at z_2 = 0, so the variance slot
  // never steps across it
  if (slot == 2 && std::holds_alternative<objective::StandardizedMoments>(spec.variant()) && z > 0.0)
    h = std::min(h, 1e-3 * z);
  mv.central[slot] = z + h;
  const double up = psi(spec, t, mv);
  mv.central[slot] = z - h;
  const double down = psi(spec, t, mv);
  const double value = (up - down) / (2.0 * h);
  if (!std::isfinite(value))
    throw Error(ErrorKind::FiniteDifference, "psi is not finite near the Gaussian point (j=" + std::to_string(j) +
                                                 ", y=" + std::to_string(y) + ")");
  return value;
}

double analytic_even_component(const ObjectiveSpec& spec, int j) {
  const int k = 2 * j;
  return std::visit(Overloaded{
                        [k](const objective::MomentCombo& m) { return -m.kappas[k] / factorial(k); },
                        [&](const auto&) { return -penalty_series_coefficient(spec.variant(), k); },
                    },
                    spec.variant());
}

int gradient_length(const ObjectiveSpec& spec) { return spec.order() / 2; }

}  // namespace

ObjectiveSpec::ObjectiveSpec(double kappa, ObjectiveVariant variant) : kappa_(kappa), variant_(std::move(variant)) {
  if (!(kappa_ >= 0.0) || !std::isfinite(kappa_)) throw Error(ErrorKind::Domain, "kappa must be finite and >= 0");
  auto require_c = [](double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::Domain, "penalty parameter c must be positive");
  };
  std::visit(Overloaded{
                 [](const objective::MomentCombo& m) {
                   validate_kappas(m.kappas, "moment combination");
                   bool any_positive = false;
                   for (int j = 2; j <= m.order(); j += 2) {
                     if (m.kappas[j] < 0.0) throw Error(ErrorKind::Domain, "even-order weights must be >= 0");
                     any_positive = any_positive || m.kappas[j] > 0.0;
                   }
                   if (!any_positive) throw Error(ErrorKind::Domain, "at least one even-order weight must be positive");
                 },
                 [](const objective::StandardizedMoments& m) {
                   validate_kappas(m.kappas, "standardized moments");
                   if (!(m.kappas[2] > 0.0)) throw Error(ErrorKind::Domain, "standardized moments need kappa_2 > 0");
                 },
                 [&](const objective::ExpPenalty& p) { require_c(p.c); },
                 [&](const objective::CoshPenalty& p) { require_c(p.c); },
                 [&](const objective::CosPenalty& p) { require_c(p.c); },
                 [](const objective::AmbiguousCos&) {},
                 [](const objective::FourierEvenPenalty&) {},
             },
             variant_);
}

std::string ObjectiveSpec::name() const {
  return std::visit(Overloaded{
                        [](const objective::MomentCombo&) { return std::string("moment_combo"); },
                        [](const objective::StandardizedMoments&) { return std::string("standardized_moments"); },
                        [](const objective::ExpPenalty&) { return std::string("exp_penalty"); },
                        [](const objective::CoshPenalty&) { return std::string("cosh_penalty"); },
                        [](const objective::CosPenalty&) { return std::string("cos_penalty"); },
                        [](const objective::AmbiguousCos&) { return std::string("ambiguous_cos"); },
                        [](const objective::FourierEvenPenalty&) { return std::string("fourier_even_penalty"); },
                    },
                    variant_);
}

int ObjectiveSpec::order() const {
  return std::visit(Overloaded{
                        [](const objective::MomentCombo& m) { return m.order(); },
                        [](const objective::StandardizedMoments& m) { return m.order(); },
                        [](const auto&) { return kSeriesOrder; },
                    },
                    variant_);
}

bool ObjectiveSpec::is_penalty() const { return penalty().has_value(); }

std::optional<PenaltyDescriptor> ObjectiveSpec::penalty() const {
  return std::visit(Overloaded{
                        [](const objective::ExpPenalty& p) -> std::optional<PenaltyDescriptor> { return penalty::Exp{p.c}; },
                        [](const objective::CoshPenalty& p) -> std::optional<PenaltyDescriptor> { return penalty::Cosh{p.c}; },
                        [](const objective::CosPenalty& p) -> std::optional<PenaltyDescriptor> { return penalty::Cos{p.c}; },
                        [](const objective::AmbiguousCos& p) -> std::optional<PenaltyDescriptor> {
                          return penalty::Ambiguous{p.law};
                        },
                        [](const objective::FourierEvenPenalty& p) -> std::optional<PenaltyDescriptor> {
                          return penalty::Fourier{p.density};
                        },
                        [](const auto&) -> std::optional<PenaltyDescriptor> { return std::nullopt; },
                    },
                    variant_);
}

ObjectiveSpec moment_combo(double kappa, Eigen::VectorXd kappas) {
  return ObjectiveSpec(kappa, objective::MomentCombo{std::move(kappas)});
}

ObjectiveSpec mean_variance(double kappa, double kappa2) {
  Eigen::VectorXd kappas = Eigen::VectorXd::Zero(3);
  kappas[2] = kappa2;
  return moment_combo(kappa, kappas);
}

double psi(const ObjectiveSpec& spec, double /*t*/, const MomentVector& mv) {
  if (const auto pen = spec.penalty()) {
    if (mv.gaussian_variance) return -gaussian_penalty_expectation(*pen, *mv.gaussian_variance);
    double sum = 0.0;
    if (std::holds_alternative<objective::FourierEvenPenalty>(spec.variant()))
      sum += penalty_series_coefficient(spec.variant(), 0);
    for (int k = 2; k <= mv.order(); ++k) sum += penalty_series_coefficient(spec.variant(), k) * mv.central[k];
    return -sum;
  }
  if (mv.order() < spec.order())
    throw Error(ErrorKind::IncompatibleOrder, "moment vector of order " + std::to_string(mv.order()) +
                                                  " is shorter than objective order " + std::to_string(spec.order()));
  return std::visit(Overloaded{
                        [&](const objective::MomentCombo& m) {
                          double sum = 0.0;
                          for (int j = 2; j <= m.order(); ++j)
                            sum += -sign_pow(j) * m.kappas[j] / factorial(j) * mv.central[j];
                          return sum;
                        },
                        [&](const objective::StandardizedMoments& m) {
                          const double z2 = mv.central[2];
                          double sum = -0.5 * m.kappas[2] * z2;
                          for (int j = 3; j <= m.order(); ++j) {
                            const double zj = mv.central[j];
                            if (zj == 0.0 || m.kappas[j] == 0.0) continue;
                            sum += -sign_pow(j) * m.kappas[j] / factorial(j) * zj / std::pow(std::abs(z2), 0.5 * j);
                          }
                          return sum;
                        },
                        [](const auto&) -> double { return 0.0; },
                    },
                    spec.variant());
}

double psi_gaussian(const ObjectiveSpec& spec, double t, double y) {
  return psi(spec, t, MomentVector::gaussian(spec.order(), y));
}

PsiGradient psi_grad_even(const ObjectiveSpec& spec, double t, double y) {
  if (!(y >= 0.0)) throw Error(ErrorKind::Domain, "psi_grad_even requires y >= 0");
  PsiGradient grad;
  grad.t = t;
  grad.values.resize(gradient_length(spec));
  const bool fd = uses_finite_differences(spec);
  for (int j = 1; j <= grad.values.size(); ++j)
    grad.values[j - 1] = fd ? fd_even_component(spec, t, y, j) : analytic_even_component(spec, j);
  return grad;
}

double curvature_sum(const ObjectiveSpec& spec, double t, double y) {
  if (!(y >= 0.0)) throw Error(ErrorKind::Domain, "curvature_sum requires y >= 0");
  return std::visit(
      Overloaded{
          [y](const objective::MomentCombo& m) {
            double sum = 0.0;
            for (int j = 1; 2 * j <= m.order(); ++j)
              sum += j * (2.0 * j - 1.0) * alpha(2 * j - 2, y) * (-m.kappas[2 * j] / factorial(2 * j));
            return sum;
          },
          [&](const objective::StandardizedMoments& m) {
            double sum = 0.0;
            for (int j = 1; 2 * j <= m.order(); ++j) {
              const double weight = alpha(2 * j - 2, y);
              if (weight == 0.0) continue;
              sum += j * (2.0 * j - 1.0) * weight * fd_even_component(spec, t, y, j);
            }
            return sum;
          },
          [y](const objective::ExpPenalty& p) { return -0.5 * p.c * std::exp(0.5 * p.c * p.c * y); },
          [y](const objective::CoshPenalty& p) { return -0.5 * p.c * std::exp(0.5 * p.c * p.c * y); },
          [y](const objective::CosPenalty& p) { return -0.5 * p.c * std::exp(-0.5 * p.c * p.c * y); },
          [y](const objective::AmbiguousCos& p) {
            return -0.5 * p.law.expect([y](double h) { return h * h * std::exp(-0.5 * h * h * y); });
          },
          [y](const objective::FourierEvenPenalty& p) {
            return 0.5 * p.density.integrate([y](double h) { return h * h * std::exp(-0.5 * h * h * y); });
          },
      },
      spec.variant());
}

}  // namespace equicontrol

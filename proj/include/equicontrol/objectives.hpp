#pragma once

// The objective J = kappa E_t[X_T] + psi(t, M_2, ..., M_n) for every supported
// family, its even-order partial derivatives at Gaussian moment vectors, and
// the curvature sum K(t, y) = sum_j j (2j-1) alpha_{2j-2}(y) psi_{z_{2j}}.

#include <Eigen/Core>

#include <string>
#include <variant>

#include "equicontrol/moments.hpp"

namespace equicontrol {

namespace objective {

/// psi = sum_{j=2}^n (-1)^{j+1} kappa_j / j! z_j
struct MomentCombo {
  /// kappas(j) is the weight of order j; entries 0 and 1 are ignored.
  Eigen::VectorXd kappas;
  int order() const { return static_cast<int>(kappas.size()) - 1; }
};

/// psi = -kappa_2/2 z_2 + sum_{j=3}^n (-1)^{j+1} kappa_j / j! z_j / |z_2|^{j/2}
struct StandardizedMoments {
  Eigen::VectorXd kappas;
  int order() const { return static_cast<int>(kappas.size()) - 1; }
};

struct ExpPenalty {
  double c;
};
struct CoshPenalty {
  double c;
};
struct CosPenalty {
  double c;
};
struct AmbiguousCos {
  DiscreteLaw law;
};
struct FourierEvenPenalty {
  FourierDensity density;
};

}  // namespace objective

using ObjectiveVariant = std::variant<objective::MomentCombo, objective::StandardizedMoments, objective::ExpPenalty,
                                      objective::CoshPenalty, objective::CosPenalty, objective::AmbiguousCos,
                                      objective::FourierEvenPenalty>;

/// kappa >= 0 weights the conditional mean; the variant fixes psi.
class ObjectiveSpec {
 public:
  ObjectiveSpec(double kappa, ObjectiveVariant variant);

  double kappa() const { return kappa_; }
  const ObjectiveVariant& variant() const { return variant_; }
  std::string name() const;

  /// Highest moment order psi reads; penalty families report the series
  /// truncation order.
  int order() const;
  bool is_penalty() const;
  /// Penalty function for the penalty families.
  std::optional<PenaltyDescriptor> penalty() const;

  ObjectiveSpec with_kappa(double kappa) const { return ObjectiveSpec(kappa, variant_); }

  /// Even-order series terms used for penalty families (orders 2..40).
  static constexpr int kSeriesOrder = 40;

 private:
  double kappa_;
  ObjectiveVariant variant_;
};

/// psi_{z_{2j}}(t, alpha(y)) for j = 1 .. values.size()
struct PsiGradient {
  double t = 0.0;
  Eigen::VectorXd values;
  double operator[](int j) const { return values[j - 1]; }
};

ObjectiveSpec moment_combo(double kappa, Eigen::VectorXd kappas);
ObjectiveSpec mean_variance(double kappa, double kappa2);

/// psi(t, z_2..z_n). Penalty families use the closed-form Gaussian expectation
/// on Gaussian-tagged vectors and the truncated moment series otherwise.
double psi(const ObjectiveSpec& spec, double t, const MomentVector& mv);

/// psi at the Gaussian point alpha(y)
double psi_gaussian(const ObjectiveSpec& spec, double t, double y);

PsiGradient psi_grad_even(const ObjectiveSpec& spec, double t, double y);

double curvature_sum(const ObjectiveSpec& spec, double t, double y);

/// Finite-difference step for the slot holding z: 1e-5 max(1, |z|).
inline double fd_step(double z) { return 1e-5 * std::max(1.0, std::abs(z)); }

}  // namespace equicontrol

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "equicontrol/error.hpp"

namespace equicontrol {

/// Uniform grid t_k = k T / N on [0, T].
class TimeGrid {
 public:
  static constexpr int kDefaultSteps = 512;

  TimeGrid(double horizon, int num_steps = kDefaultSteps) : horizon_(horizon), num_steps_(num_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      throw Error(ErrorKind::Domain, "horizon must be positive and finite");
    if (num_steps < 2) throw Error(ErrorKind::Domain, "num_steps must be at least 2");
  }

  double horizon() const { return horizon_; }
  int num_steps() const { return num_steps_; }
  int num_nodes() const { return num_steps_ + 1; }
  double step() const { return horizon_ / num_steps_; }
  double node(int k) const { return k == num_steps_ ? horizon_ : k * step(); }

  Eigen::ArrayXd nodes() const {
    Eigen::ArrayXd t(num_nodes());
    for (int k = 0; k < num_nodes(); ++k) t[k] = node(k);
    return t;
  }

  bool contains(double t) const {
    const double slack = 1e-12 * horizon_;
    return t >= -slack && t <= horizon_ + slack;
  }

  void require_contains(double t, const char* what = "t") const {
    if (!contains(t))
      throw Error(ErrorKind::Domain,
                  std::string(what) + "=" + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
  }

  double clamp(double t) const { return std::clamp(t, 0.0, horizon_); }

  /// Cell index k with t in [t_k, t_{k+1}]; the last cell owns t = T.
  int cell(double t) const {
    const int k = static_cast<int>(std::floor(clamp(t) / step()));
    return std::clamp(k, 0, num_steps_ - 1);
  }

  /// Index of the node equal to t (to rounding), or -1.
  int node_index(double t) const {
    const double s = clamp(t) / step();
    const double r = std::round(s);
    return std::abs(s - r) <= 1e-9 ? static_cast<int>(r) : -1;
  }

  bool operator==(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && num_steps_ == other.num_steps_;
  }

 private:
  double horizon_;
  int num_steps_;
};

}  // namespace equicontrol

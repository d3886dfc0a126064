#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace equicontrol {

enum class ErrorKind {
  Domain,
  GridMismatch,
  Overflow,
  Quadrature,
  IncompatibleOrder,
  FiniteDifference,
  UnsupportedVariant,
  CosDomain,
  Positivity,
  StepFailure,
  Bracket,
  EpsilonRange,
  Resource,
  Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Quadrature: return "quadrature-failure";
    case ErrorKind::IncompatibleOrder: return "incompatible-order";
    case ErrorKind::FiniteDifference: return "finite-difference";
    case ErrorKind::UnsupportedVariant: return "unsupported-variant";
    case ErrorKind::CosDomain: return "cos-domain";
    case ErrorKind::Positivity: return "positivity-violation";
    case ErrorKind::StepFailure: return "step-failure";
    case ErrorKind::Bracket: return "bracket-expansion";
    case ErrorKind::EpsilonRange: return "epsilon-range";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace equicontrol

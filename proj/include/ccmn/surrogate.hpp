#ifndef CCMN_SURROGATE_HPP_
#define CCMN_SURROGATE_HPP_

#include <string>

#include "ccmn/errors.hpp"

namespace ccmn {

/// Convex margin loss phi used inside the surrogate and corrected losses.
///
/// Square and hinge are evaluated on the margin clipped to
/// [-clamp_bound, clamp_bound], which makes their supremum Theta finite as
/// the unbiasedness lemmas and error bounds require. Sigmoid is bounded by 1
/// on its own and is never clipped.
class SurrogateLoss {
public:
  enum class Kind { Square, Hinge, Sigmoid };

  explicit SurrogateLoss(Kind kind, double clamp_bound = 10.0);

  /// Parses "square" | "hinge" | "sigmoid" (the CLI flag values).
  static SurrogateLoss from_name(const std::string& name, double clamp_bound = 10.0);

  Kind kind() const { return kind_; }
  double clamp_bound() const { return clamp_bound_; }
  const char* name() const;

  /// phi(t). Square: (1-t)^2; hinge: max(0, 1-t); sigmoid: 1/(1+e^t).
  double value(double t) const;

  /// dphi/dt with the hinge subgradient at t=1 taken as 0 and derivative 0
  /// outside the clamped region.
  double derivative(double t) const;

  /// Theta, the supremum of phi over the (clamped) domain.
  double bound() const;

private:
  Kind kind_;
  double clamp_bound_;
};

}  // namespace ccmn

#endif  // CCMN_SURROGATE_HPP_

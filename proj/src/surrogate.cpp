#include "ccmn/surrogate.hpp"

#include <algorithm>
#include <cmath>

namespace ccmn {

namespace {

void check_finite(double t) {
  if (!std::isfinite(t)) throw NonFiniteInput("surrogate loss input is not finite");
}

// Numerically stable 1/(1+e^t) for any finite t.
double logistic_of_negative(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

SurrogateLoss::SurrogateLoss(Kind kind, double clamp_bound)
    : kind_(kind), clamp_bound_(clamp_bound) {
  if (!(clamp_bound > 0.0) || !std::isfinite(clamp_bound))
    throw NonFiniteInput("clamp bound must be a positive finite real");
}

SurrogateLoss SurrogateLoss::from_name(const std::string& name, double clamp_bound) {
  if (name == "square") return SurrogateLoss(Kind::Square, clamp_bound);
  if (name == "hinge") return SurrogateLoss(Kind::Hinge, clamp_bound);
  if (name == "sigmoid") return SurrogateLoss(Kind::Sigmoid, clamp_bound);
  throw ParseError("unknown loss kind: " + name);
}

const char* SurrogateLoss::name() const {
  switch (kind_) {
    case Kind::Square: return "square";
    case Kind::Hinge: return "hinge";
    case Kind::Sigmoid: return "sigmoid";
  }
  return "?";
}

double SurrogateLoss::value(double t) const {
  check_finite(t);
  switch (kind_) {
    case Kind::Square: {
      const double tc = std::clamp(t, -clamp_bound_, clamp_bound_);
      const double m = 1.0 - tc;
      return m * m;
    }
    case Kind::Hinge: {
      const double tc = std::clamp(t, -clamp_bound_, clamp_bound_);
      return std::max(0.0, 1.0 - tc);
    }
    case Kind::Sigmoid:
      return logistic_of_negative(t);
  }
  return 0.0;
}

double SurrogateLoss::derivative(double t) const {
  check_finite(t);
  switch (kind_) {
    case Kind::Square:
      if (std::fabs(t) > clamp_bound_) return 0.0;
      return -2.0 * (1.0 - t);
    case Kind::Hinge:
      if (std::fabs(t) > clamp_bound_) return 0.0;
      return t < 1.0 ? -1.0 : 0.0;
    case Kind::Sigmoid: {
      const double s = logistic_of_negative(t);
      return -s * (1.0 - s);
    }
  }
  return 0.0;
}

double SurrogateLoss::bound() const {
  switch (kind_) {
    case Kind::Square: {
      const double m = 1.0 + clamp_bound_;
      return m * m;
    }
    case Kind::Hinge:
      return 1.0 + clamp_bound_;
    case Kind::Sigmoid:
      return 1.0;
  }
  return 0.0;
}

}  // namespace ccmn

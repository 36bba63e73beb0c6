#pragma once

// Moment-to-parameter inversion. The forward map sends (mu, Lambda, p) to
//   u = mu/(1-Lambda p),  v = mu^2 Lambda^2 p(1-p)/(1-Lambda p)^2,  w = mu/(1-Lambda p)^3,
// and the inverse is
//   Phi1 = u sqrt(u/w),  Phi2 = (v + (u-Phi1)^2) / (u (u-Phi1)),  Phi3 = (1 - Phi1/u) / Phi2,
// valid on D = {w > u > 0, v >= 0}. Outside D the estimate is zeroed and flagged.

#include <cmath>

#include "hawkes/errors.hpp"

namespace hawkes {

struct param_estimate {
  double mu_hat = 0.0;
  double lambda_hat = 0.0;
  double p_hat = 0.0;
  bool in_domain = false;
};

inline param_estimate invert_phi(double u, double v, double w) {
  if (!(w > u && u > 0.0 && v >= 0.0)) return {};
  double phi1 = u * std::sqrt(u / w);
  double d = u - phi1;
  // d > 0 whenever w > u in exact arithmetic; d == 0 only by rounding.
  if (!(d > 0.0)) throw domain_error("moment inversion degenerate: u equals mu estimate");
  double phi2 = (v + d * d) / (u * d);
  double phi3 = (d / u) / phi2;
  return {phi1, phi2, phi3, true};
}

// Phi3 alone reduces algebraically to (u-Phi1)^2 / (v + (u-Phi1)^2), which stays
// evaluable for any u > 0, w > 0 (v may be negative for finite-sample inputs).
inline double phi3(double u, double v, double w) {
  if (!(u > 0.0)) return 0.0;  // no events, no connectivity signal
  if (!(w > 0.0)) return 1.0;  // w -> 0+ limit of the closed form
  double d = u - u * std::sqrt(u / w);
  double denom = v + d * d;
  if (denom == 0.0) return 0.0;  // fully degenerate statistics
  return d * d / denom;
}

}  // namespace hawkes

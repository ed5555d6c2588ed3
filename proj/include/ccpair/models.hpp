#pragma once

// Vehicle parameter sets, nonlinear policies and the two car-following laws:
// the connected cruise-and-traffic controller for CAV pairs and the optimal
// velocity model used for human drivers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccpair/error.hpp"

namespace ccpair {

struct VehicleLimits {
  double a_min = 7.0;  // braking limit, positive magnitude [m/s^2]
  double a_max = 3.0;  // [m/s^2]
  double v_max = 30.0;  // [m/s]
  double h_st = 10.0;  // standstill headway [m]

  void validate() const {
    if (!(a_min > 0.0) || !(a_max > 0.0) || !(v_max > 0.0) || !(h_st >= 0.0) ||
        !std::isfinite(a_min) || !std::isfinite(a_max) || !std::isfinite(v_max) ||
        !std::isfinite(h_st)) {
      throw Error(ErrorCode::kInvalidArgument, "vehicle limits must be positive (h_st >= 0)");
    }
  }

  bool operator==(const VehicleLimits&) const = default;
};

/// Controller of one CAV of a pair. `beta_cross` is the gain on the partner
/// CAV's speed; zero turns the controller into plain ACC.
struct CavParams {
  double sigma = 0.6;  // input delay [s]
  double h_go = 60.0;  // free-flow headway [m]
  double alpha = 0.4;  // headway gain [1/s]
  double beta = 0.5;  // predecessor speed gain [1/s]
  double beta_cross = 0.0;  // partner speed gain [1/s]
  VehicleLimits limits;

  /// Slope of the linear range-policy branch.
  double kappa() const { return limits.v_max / (h_go - limits.h_st); }

  void validate() const {
    limits.validate();
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw Error(ErrorCode::kInvalidArgument, "CAV delay must be non-negative");
    }
    if (!(h_go > limits.h_st) || !std::isfinite(h_go)) {
      throw Error(ErrorCode::kInvalidArgument, "CAV h_go must exceed h_st");
    }
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(beta_cross)) {
      throw Error(ErrorCode::kInvalidArgument, "CAV gains must be finite");
    }
  }

  bool operator==(const CavParams&) const = default;
};

struct HvParams {
  double tau = 0.8;  // driver reaction + actuation delay [s]
  double h_go = 60.0;  // [m]
  double alpha = 0.1;  // [1/s]
  double beta = 0.6;  // [1/s]
  VehicleLimits limits;

  void validate() const {
    limits.validate();
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
      throw Error(ErrorCode::kInvalidArgument, "HV delay must be non-negative");
    }
    if (!(h_go > limits.h_st) || !std::isfinite(h_go)) {
      throw Error(ErrorCode::kInvalidArgument, "HV h_go must exceed h_st");
    }
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
      throw Error(ErrorCode::kInvalidArgument, "HV gains must be non-negative");
    }
  }

  bool operator==(const HvParams&) const = default;
};

struct Equilibrium {
  double v_star = 0.0;
  double h_star_tail = 0.0;
  double h_star_head = 0.0;
  double h_star_hv = 0.0;
  double kappa_tail = 0.0;
  double kappa_head = 0.0;
  double kappa_hv = 0.0;
};

// Default parameter set of the case study.
inline CavParams default_tail_cav() {
  CavParams p;
  p.beta_cross = 0.8;
  return p;
}

inline CavParams default_head_cav() {
  CavParams p;
  p.beta_cross = 0.1;
  return p;
}

inline HvParams default_hv() { return HvParams{}; }

inline constexpr double kDefaultEquilibriumSpeed = 20.0;

/// Returns a copy of `p` whose linear range-policy branch has slope `kappa`.
inline CavParams with_kappa(CavParams p, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::kInvalidArgument, "kappa must be positive");
  }
  p.h_go = p.limits.h_st + p.limits.v_max / kappa;
  return p;
}

inline double saturate(double u, const VehicleLimits& limits) {
  return std::min(std::max(-limits.a_min, u), limits.a_max);
}

inline double range_policy_cav(double h, const CavParams& p) {
  const auto& lim = p.limits;
  if (h <= lim.h_st) return 0.0;
  if (h >= p.h_go) return lim.v_max;
  return lim.v_max * (h - lim.h_st) / (p.h_go - lim.h_st);
}

inline double range_policy_hv(double h, const HvParams& p) {
  const auto& lim = p.limits;
  if (h <= lim.h_st) return 0.0;
  if (h >= p.h_go) return lim.v_max;
  const double span = p.h_go - lim.h_st;
  return lim.v_max * (2.0 * p.h_go - lim.h_st - h) * (h - lim.h_st) / (span * span);
}

inline double speed_policy(double v, double v_max) { return std::min(v, v_max); }

/// Commanded acceleration of a CAV before delay and saturation.
inline double cav_control(double h_own, double v_own, double v_pred, double v_partner,
                          const CavParams& p) {
  const double v_max = p.limits.v_max;
  return p.alpha * (range_policy_cav(h_own, p) - v_own) +
         p.beta * (speed_policy(v_pred, v_max) - v_own) +
         p.beta_cross * (speed_policy(v_partner, v_max) - v_own);
}

inline double hv_control(double h, double v, double v_pred, const HvParams& p) {
  return p.alpha * (range_policy_hv(h, p) - v) + p.beta * (v_pred - v);
}

inline double range_gradient_cav(double h, const CavParams& p) {
  if (!(h > p.limits.h_st && h < p.h_go)) {
    throw Error(ErrorCode::kZeroGradient,
                "CAV headway " + std::to_string(h) + " is on a saturated range-policy branch");
  }
  return p.kappa();
}

inline double range_gradient_hv(double h, const HvParams& p) {
  const auto& lim = p.limits;
  if (!(h > lim.h_st && h < p.h_go)) {
    throw Error(ErrorCode::kZeroGradient,
                "HV headway " + std::to_string(h) + " is on a saturated range-policy branch");
  }
  const double span = p.h_go - lim.h_st;
  return 2.0 * lim.v_max * (p.h_go - h) / (span * span);
}

namespace detail {

// Nudges `h` by a few ulps so that policy(h) reproduces `v` bit-exactly when
// such a headway exists; otherwise keeps the closest one.
template <class Policy>
double polish_headway(double h, double v, Policy&& policy) {
  double best = h;
  double best_err = std::abs(policy(h) - v);
  for (double dir : {1.0, -1.0}) {
    double x = h;
    for (int k = 0; k < 16 && best_err > 0.0; ++k) {
      x = std::nextafter(x, dir * std::numeric_limits<double>::infinity());
      const double err = std::abs(policy(x) - v);
      if (err < best_err) {
        best = x;
        best_err = err;
      }
    }
  }
  return best;
}

}  // namespace detail

inline double cav_equilibrium_headway(double v_star, const CavParams& p) {
  const double h = v_star / p.kappa() + p.limits.h_st;
  return detail::polish_headway(h, v_star, [&](double x) { return range_policy_cav(x, p); });
}

/// Smaller root of V_h(h) = v_star; the larger one sits past the vertex of
/// the quadratic where the policy would be decreasing.
inline double hv_equilibrium_headway(double v_star, const HvParams& p) {
  const double span = p.h_go - p.limits.h_st;
  const double ratio = v_star / p.limits.v_max;
  const double offset = span * ratio / (1.0 + std::sqrt(1.0 - ratio));
  const double h = p.limits.h_st + offset;
  return detail::polish_headway(h, v_star, [&](double x) { return range_policy_hv(x, p); });
}

inline Equilibrium compute_equilibrium(double v_star, const CavParams& tail,
                                       const CavParams& head, const HvParams& hv) {
  tail.validate();
  head.validate();
  hv.validate();
  const double v_max = std::min({tail.limits.v_max, head.limits.v_max, hv.limits.v_max});
  if (!(v_star > 0.0 && v_star < v_max)) {
    throw Error(ErrorCode::kNoEquilibrium,
                "v_star=" + std::to_string(v_star) + " must lie strictly inside (0, v_max)");
  }
  Equilibrium eq;
  eq.v_star = v_star;
  eq.h_star_tail = cav_equilibrium_headway(v_star, tail);
  eq.h_star_head = cav_equilibrium_headway(v_star, head);
  eq.h_star_hv = hv_equilibrium_headway(v_star, hv);
  eq.kappa_tail = range_gradient_cav(eq.h_star_tail, tail);
  eq.kappa_head = range_gradient_cav(eq.h_star_head, head);
  eq.kappa_hv = range_gradient_hv(eq.h_star_hv, hv);
  return eq;
}

}  // namespace ccpair

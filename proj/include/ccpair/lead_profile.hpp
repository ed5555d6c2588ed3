#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ccpair/error.hpp"

namespace ccpair {

struct LeadSegment {
  double duration = 0.0;  // [s]
  double accel = 0.0;  // [m/s^2]

  bool operator==(const LeadSegment&) const = default;
};

/// Lead-vehicle motion as piecewise-constant acceleration. The speed is held
/// after the last segment and clamped to [0, v_max] throughout.
struct LeadProfile {
  double v_init = 20.0;
  std::vector<LeadSegment> segments;
  double v_max = 30.0;

  void validate() const {
    if (!std::isfinite(v_init) || v_init < 0.0 || v_init > v_max) {
      throw Error(ErrorCode::kInvalidArgument, "lead v_init must lie in [0, v_max]");
    }
    for (const auto& seg : segments) {
      if (!(seg.duration > 0.0) || !std::isfinite(seg.duration) || !std::isfinite(seg.accel)) {
        throw Error(ErrorCode::kInvalidArgument, "lead segment durations must be positive");
      }
    }
  }

  bool operator==(const LeadProfile&) const = default;
};

/// Knot table for repeated evaluation of a LeadProfile.
class LeadEvaluator {
 public:
  explicit LeadEvaluator(const LeadProfile& profile) : v_max_(profile.v_max) {
    knot_t_.push_back(0.0);
    knot_v_.push_back(clamp(profile.v_init));
    double t = 0.0;
    double v = profile.v_init;
    for (const auto& seg : profile.segments) {
      t += seg.duration;
      v = clamp(v + seg.accel * seg.duration);
      knot_t_.push_back(t);
      knot_v_.push_back(v);
    }
    accel_.reserve(profile.segments.size());
    for (const auto& seg : profile.segments) accel_.push_back(seg.accel);
  }

  double operator()(double t) const {
    if (t <= 0.0) return knot_v_.front();
    if (t >= knot_t_.back()) return knot_v_.back();
    const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
    const auto seg = static_cast<std::size_t>(it - knot_t_.begin()) - 1;
    return clamp(knot_v_[seg] + accel_[seg] * (t - knot_t_[seg]));
  }

 private:
  double clamp(double v) const { return std::clamp(v, 0.0, v_max_); }

  double v_max_;
  std::vector<double> knot_t_;
  std::vector<double> knot_v_;
  std::vector<double> accel_;
};

inline double evaluate_lead(const LeadProfile& profile, double t) {
  if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "lead profile queried at t < 0");
  return LeadEvaluator(profile)(t);
}

inline LeadProfile constant_lead(double v) {
  LeadProfile p;
  p.v_init = v;
  return p;
}

/// One full sine cycle of speed, v(t) = v_init - amplitude * sin(2 pi t / period),
/// realised exactly at the knots of `n_segments` constant-acceleration pieces,
/// then cruise at v_init. The lead brakes, accelerates past v_init and
/// returns to cruise.
inline LeadProfile sine_cycle_lead(double v_init, double amplitude, double period,
                                   int n_segments) {
  if (!(period > 0.0) || n_segments < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sine-cycle lead needs period > 0 and segments");
  }
  LeadProfile p;
  p.v_init = v_init;
  const double dt = period / n_segments;
  auto deviation = [&](double t) {
    return -amplitude * std::sin(2.0 * std::numbers::pi * t / period);
  };
  for (int k = 0; k < n_segments; ++k) {
    const double t0 = k * dt;
    const double t1 = (k + 1) * dt;
    p.segments.push_back({dt, (deviation(t1) - deviation(t0)) / dt});
  }
  return p;
}

/// Default lead motion used by the packet and fleet experiments:
/// 2 m/s sine cycle around 20 m/s with a 14 s period.
inline LeadProfile canonical_lead_profile() { return sine_cycle_lead(20.0, 2.0, 14.0, 56); }

/// Small speed bump used to excite a packet around equilibrium.
inline LeadProfile impulse_lead(double v_init, double bump, double width = 1.0) {
  LeadProfile p;
  p.v_init = v_init;
  p.segments = {{width / 2.0, 2.0 * bump / width}, {width / 2.0, -2.0 * bump / width}};
  return p;
}

}  // namespace ccpair

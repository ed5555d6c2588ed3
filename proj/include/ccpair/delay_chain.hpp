#pragma once

// Fixed-step RK4 integrator for a chain of vehicles with delayed inputs.
//
// Vehicle i follows vehicle i+1; the last vehicle follows the lead, whose
// speed is prescribed. Each vehicle has state (h_i, v_i) with
//   h_i' = v_{i+1} - v_i,   v_i' = a_i(u_i(t - d_i), v_i),
// where u_i is the undelayed command computed from the chain state. Past
// commands live in a ring buffer and are read back with cubic Lagrange
// interpolation.
//
// A Model provides:
//   std::size_t size() const;
//   double delay(std::size_t i) const;
//   double lead_speed(double t) const;
//   double command(std::size_t i, std::span<const double> h,
//                  std::span<const double> v, double v_lead) const;
//   double accel(std::size_t i, double u_delayed, double v_own) const;

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ccpair/error.hpp"

namespace ccpair {

struct IntegrationSettings {
  double dt = 0.01;  // [s]
  double horizon = 120.0;  // [s]
  std::size_t record_stride = 1;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
    }
    if (record_stride < 1) throw Error(ErrorCode::kInvalidArgument, "record stride must be >= 1");
  }

  bool operator==(const IntegrationSettings&) const = default;
};

/// Sampled chain response. Series are indexed [vehicle][sample].
struct ChainRecord {
  std::vector<double> times;
  std::vector<std::vector<double>> h;
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> u;
  std::vector<double> v_lead;
  bool collision = false;
  double collision_time = std::numeric_limits<double>::quiet_NaN();
  std::size_t collision_vehicle = 0;
};

namespace detail {

class CommandHistory {
 public:
  CommandHistory(std::size_t n_vehicles, std::size_t capacity)
      : n_(n_vehicles), cap_(capacity), ring_(n_vehicles * capacity), initial_(n_vehicles) {}

  void set_initial(std::span<const double> u) { initial_.assign(u.begin(), u.end()); }

  double* row(long step) { return &ring_[slot(step) * n_]; }

  double at(std::size_t i, long step) const {
    if (step < 0) return initial_[i];
    return ring_[slot(step) * n_ + i];
  }

  /// Value of u_i at fractional step position x, using only steps <= latest.
  double interpolate(std::size_t i, double x, long latest) const {
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-9 && nearest <= static_cast<double>(latest)) {
      return at(i, static_cast<long>(nearest));
    }
    long start = static_cast<long>(std::floor(x)) - 1;
    if (start + 3 > latest) start = latest - 3;
    const double r = x - static_cast<double>(start);
    // Lagrange basis on nodes 0, 1, 2, 3.
    const double w0 = -(r - 1.0) * (r - 2.0) * (r - 3.0) / 6.0;
    const double w1 = r * (r - 2.0) * (r - 3.0) / 2.0;
    const double w2 = -r * (r - 1.0) * (r - 3.0) / 2.0;
    const double w3 = r * (r - 1.0) * (r - 2.0) / 6.0;
    return w0 * at(i, start) + w1 * at(i, start + 1) + w2 * at(i, start + 2) +
           w3 * at(i, start + 3);
  }

 private:
  std::size_t slot(long step) const { return static_cast<std::size_t>(step) % cap_; }

  std::size_t n_;
  std::size_t cap_;
  std::vector<double> ring_;
  std::vector<double> initial_;
};

}  // namespace detail

/// Integrates `model` from the constant history (h0, v0) over the horizon.
/// Throws kIntegrationFailure on a non-finite state; negative headways only
/// set the collision flag.
template <class Model>
ChainRecord integrate_chain(const Model& model, std::span<const double> h0,
                            std::span<const double> v0, const IntegrationSettings& settings) {
  settings.validate();
  const std::size_t m = model.size();
  if (h0.size() != m || v0.size() != m) {
    throw Error(ErrorCode::kInvalidArgument, "initial state size does not match the chain");
  }
  const double dt = settings.dt;
  const long steps = std::lround(settings.horizon / dt);

  std::vector<double> delay_steps(m);
  std::vector<bool> instantaneous(m);
  double max_delay = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = model.delay(i);
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::kInvalidArgument, "delays must be non-negative");
    }
    double ds = d / dt;
    if (std::abs(ds - std::round(ds)) <= 1e-9) ds = std::round(ds);
    delay_steps[i] = ds;
    instantaneous[i] = d == 0.0;
    max_delay = std::max(max_delay, ds);
  }
  detail::CommandHistory history(m, static_cast<std::size_t>(std::ceil(max_delay)) + 8);

  std::vector<double> h(h0.begin(), h0.end());
  std::vector<double> v(v0.begin(), v0.end());

  auto store_commands = [&](long step, double t, std::span<const double> hs,
                            std::span<const double> vs) {
    double* row = history.row(step);
    const double lead = model.lead_speed(t);
    for (std::size_t i = 0; i < m; ++i) row[i] = model.command(i, hs, vs, lead);
  };

  store_commands(0, 0.0, h, v);
  {
    std::vector<double> u_init(m);
    for (std::size_t i = 0; i < m; ++i) u_init[i] = history.at(i, 0);
    history.set_initial(u_init);
  }

  ChainRecord rec;
  const auto n_samples = static_cast<std::size_t>(steps) / settings.record_stride + 1;
  rec.times.reserve(n_samples);
  rec.v_lead.reserve(n_samples);
  rec.h.assign(m, {});
  rec.v.assign(m, {});
  rec.u.assign(m, {});
  for (std::size_t i = 0; i < m; ++i) {
    rec.h[i].reserve(n_samples);
    rec.v[i].reserve(n_samples);
    rec.u[i].reserve(n_samples);
  }
  auto record = [&](long step, double t) {
    rec.times.push_back(t);
    rec.v_lead.push_back(model.lead_speed(t));
    for (std::size_t i = 0; i < m; ++i) {
      rec.h[i].push_back(h[i]);
      rec.v[i].push_back(v[i]);
      rec.u[i].push_back(history.at(i, step));
    }
  };
  record(0, 0.0);

  std::vector<double> kh[4], kv[4];
  for (int s = 0; s < 4; ++s) {
    kh[s].resize(m);
    kv[s].resize(m);
  }
  std::vector<double> hs(m), vs(m), stage_cmd(m);

  // Derivative at stage offset c (in steps) from the state (hs, vs).
  auto derivative = [&](long n, double c, std::span<const double> hst,
                        std::span<const double> vst, std::vector<double>& dh,
                        std::vector<double>& dv) {
    const double t = (static_cast<double>(n) + c) * dt;
    const double lead = model.lead_speed(t);
    for (std::size_t i = 0; i < m; ++i) {
      const double pred = i + 1 < m ? vst[i + 1] : lead;
      dh[i] = pred - vst[i];
      const double ud = instantaneous[i]
                            ? model.command(i, hst, vst, lead)
                            : history.interpolate(i, static_cast<double>(n) + c - delay_steps[i], n);
      dv[i] = model.accel(i, ud, vst[i]);
    }
  };

  for (long n = 0; n < steps; ++n) {
    derivative(n, 0.0, h, v, kh[0], kv[0]);
    for (std::size_t i = 0; i < m; ++i) {
      hs[i] = h[i] + 0.5 * dt * kh[0][i];
      vs[i] = v[i] + 0.5 * dt * kv[0][i];
    }
    derivative(n, 0.5, hs, vs, kh[1], kv[1]);
    for (std::size_t i = 0; i < m; ++i) {
      hs[i] = h[i] + 0.5 * dt * kh[1][i];
      vs[i] = v[i] + 0.5 * dt * kv[1][i];
    }
    derivative(n, 0.5, hs, vs, kh[2], kv[2]);
    for (std::size_t i = 0; i < m; ++i) {
      hs[i] = h[i] + dt * kh[2][i];
      vs[i] = v[i] + dt * kv[2][i];
    }
    derivative(n, 1.0, hs, vs, kh[3], kv[3]);

    const double t_next = static_cast<double>(n + 1) * dt;
    for (std::size_t i = 0; i < m; ++i) {
      h[i] += dt / 6.0 * (kh[0][i] + 2.0 * kh[1][i] + 2.0 * kh[2][i] + kh[3][i]);
      v[i] += dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
      if (!std::isfinite(h[i]) || !std::isfinite(v[i])) {
        throw Error(ErrorCode::kIntegrationFailure,
                    "non-finite state of vehicle " + std::to_string(i) + " at t=" +
                        std::to_string(t_next));
      }
      if (h[i] < 0.0 && !rec.collision) {
        rec.collision = true;
        rec.collision_time = t_next;
        rec.collision_vehicle = i;
      }
    }
    store_commands(n + 1, t_next, h, v);
    if ((n + 1) % static_cast<long>(settings.record_stride) == 0) record(n + 1, t_next);
  }
  return rec;
}

}  // namespace ccpair

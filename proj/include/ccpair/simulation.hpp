#pragma once

// Nonlinear packet and fleet simulation on top of the delay-chain integrator.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ccpair/delay_chain.hpp"
#include "ccpair/error.hpp"
#include "ccpair/lead_profile.hpp"
#include "ccpair/models.hpp"
#include "ccpair/pairing.hpp"

namespace ccpair {

enum class Role { kHv, kAv, kCavHead, kCavTail, kLead };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::kHv: return "HV";
    case Role::kAv: return "AV";
    case Role::kCavHead: return "CAV-head";
    case Role::kCavTail: return "CAV-tail";
    case Role::kLead: return "lead";
  }
  return "?";
}

inline double reverse_guard(double u, double v, double alpha_v = 10.0) {
  return std::max(u, -alpha_v * v);
}

/// Tail CAV at index 0, HVs at 1..n_hv, head CAV at n_hv + 1, lead at n_hv + 2.
struct PacketScenario {
  std::size_t n_hv = 5;
  CavParams cav_tail = default_tail_cav();
  CavParams cav_head = default_head_cav();
  HvParams hv = default_hv();
  double v_star = kDefaultEquilibriumSpeed;
  LeadProfile lead = canonical_lead_profile();
  IntegrationSettings integration{};
  double reverse_guard_gain = 10.0;

  void validate() const;
};

/// Vehicle i follows i + 1; index n_vehicles is the lead. CAVs that are not
/// paired (or all CAVs when connectivity is off) run the controller with
/// cav_tail's gains and no cross term.
struct FleetScenario {
  std::size_t n_vehicles = 100;
  std::vector<std::size_t> cav_indices;
  std::uint64_t rng_seed = 1;
  std::size_t pairing_max_gap = 7;
  bool connectivity_enabled = true;
  CavParams cav_tail = default_tail_cav();
  CavParams cav_head = default_head_cav();
  HvParams hv = default_hv();
  double v_star = kDefaultEquilibriumSpeed;
  LeadProfile lead = canonical_lead_profile();
  IntegrationSettings integration{.dt = 0.01, .horizon = 300.0, .record_stride = 1};
  double reverse_guard_gain = 10.0;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> h;  // [vehicle][sample]
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> u;  // commanded, undelayed, unsaturated
  std::vector<double> v_lead;
  std::vector<Role> roles;  // followers then the lead
  bool collision = false;
  double collision_time = std::numeric_limits<double>::quiet_NaN();
  std::size_t collision_vehicle = 0;

  std::size_t n_followers() const { return h.size(); }
  std::size_t lead_index() const { return h.size(); }

  /// Speed series of vehicle i; i == lead_index() gives the lead.
  const std::vector<double>& speed(std::size_t i) const {
    if (i == lead_index()) return v_lead;
    if (i > lead_index()) throw Error(ErrorCode::kInvalidArgument, "vehicle index out of range");
    return v[i];
  }
};

struct FleetResult {
  Trajectory trajectory;
  PairingAssignment pairing;
};

namespace detail {

struct ChainVehicle {
  Role role = Role::kHv;
  CavParams cav;
  HvParams hv;
  std::size_t partner = std::numeric_limits<std::size_t>::max();
};

class NonlinearChain {
 public:
  NonlinearChain(std::vector<ChainVehicle> vehicles, const LeadProfile& lead, double guard_gain)
      : vehicles_(std::move(vehicles)), lead_(lead), guard_gain_(guard_gain) {}

  std::size_t size() const { return vehicles_.size(); }

  double delay(std::size_t i) const {
    const auto& veh = vehicles_[i];
    return veh.role == Role::kHv ? veh.hv.tau : veh.cav.sigma;
  }

  double lead_speed(double t) const { return lead_(t); }

  double command(std::size_t i, std::span<const double> h, std::span<const double> v,
                 double v_lead) const {
    const auto& veh = vehicles_[i];
    const double pred = i + 1 < v.size() ? v[i + 1] : v_lead;
    if (veh.role == Role::kHv) return hv_control(h[i], v[i], pred, veh.hv);
    const double partner = veh.partner < v.size() ? v[veh.partner] : v[i];
    return cav_control(h[i], v[i], pred, partner, veh.cav);
  }

  double accel(std::size_t i, double u_delayed, double v_own) const {
    const auto& veh = vehicles_[i];
    const auto& lim = veh.role == Role::kHv ? veh.hv.limits : veh.cav.limits;
    return reverse_guard(saturate(u_delayed, lim), v_own, guard_gain_);
  }

 private:
  std::vector<ChainVehicle> vehicles_;
  LeadEvaluator lead_;
  double guard_gain_;
};

inline Trajectory run_chain(std::vector<ChainVehicle> vehicles, double v_star,
                            const LeadProfile& lead, const IntegrationSettings& settings,
                            double guard_gain) {
  std::vector<double> h0;
  std::vector<double> v0(vehicles.size(), v_star);
  std::vector<Role> roles;
  for (const auto& veh : vehicles) {
    h0.push_back(veh.role == Role::kHv ? hv_equilibrium_headway(v_star, veh.hv)
                                       : cav_equilibrium_headway(v_star, veh.cav));
    roles.push_back(veh.role);
  }
  roles.push_back(Role::kLead);
  NonlinearChain chain(std::move(vehicles), lead, guard_gain);
  ChainRecord rec = integrate_chain(chain, h0, v0, settings);
  Trajectory traj;
  traj.times = std::move(rec.times);
  traj.h = std::move(rec.h);
  traj.v = std::move(rec.v);
  traj.u = std::move(rec.u);
  traj.v_lead = std::move(rec.v_lead);
  traj.roles = std::move(roles);
  traj.collision = rec.collision;
  traj.collision_time = rec.collision_time;
  traj.collision_vehicle = rec.collision_vehicle;
  return traj;
}

inline void check_lead_start(const LeadProfile& lead, double v_star) {
  lead.validate();
  if (std::abs(lead.v_init - v_star) > 1e-12 * std::max(1.0, v_star)) {
    throw Error(ErrorCode::kInvalidArgument, "lead must start at the equilibrium speed");
  }
}

inline void check_guard(double gain) {
  if (!(gain >= 0.0) || !std::isfinite(gain)) {
    throw Error(ErrorCode::kInvalidArgument, "reverse guard gain must be non-negative");
  }
}

}  // namespace detail

inline void PacketScenario::validate() const {
  compute_equilibrium(v_star, cav_tail, cav_head, hv);
  integration.validate();
  if (!(integration.horizon > std::max(cav_tail.sigma, std::max(cav_head.sigma, hv.tau)))) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must exceed the largest delay");
  }
  detail::check_lead_start(lead, v_star);
  detail::check_guard(reverse_guard_gain);
}

inline void FleetScenario::validate() const {
  compute_equilibrium(v_star, cav_tail, cav_head, hv);
  integration.validate();
  if (n_vehicles < 1) throw Error(ErrorCode::kInvalidArgument, "fleet needs at least one vehicle");
  for (auto idx : cav_indices) {
    if (idx >= n_vehicles) throw Error(ErrorCode::kInvalidArgument, "CAV index out of range");
  }
  if (pairing_max_gap < 1) throw Error(ErrorCode::kInvalidArgument, "pairing max gap must be >= 1");
  detail::check_lead_start(lead, v_star);
  detail::check_guard(reverse_guard_gain);
}

inline Trajectory simulate_packet(const PacketScenario& sc) {
  sc.validate();
  std::vector<detail::ChainVehicle> vehicles(sc.n_hv + 2);
  const std::size_t head = sc.n_hv + 1;
  vehicles[0].role = Role::kCavTail;
  vehicles[0].cav = sc.cav_tail;
  vehicles[0].partner = head;
  for (std::size_t i = 1; i <= sc.n_hv; ++i) {
    vehicles[i].role = Role::kHv;
    vehicles[i].hv = sc.hv;
  }
  vehicles[head].role = Role::kCavHead;
  vehicles[head].cav = sc.cav_head;
  vehicles[head].partner = 0;
  return detail::run_chain(std::move(vehicles), sc.v_star, sc.lead, sc.integration,
                           sc.reverse_guard_gain);
}

inline FleetResult simulate_fleet(const FleetScenario& sc) {
  sc.validate();
  std::vector<bool> is_cav(sc.n_vehicles, false);
  for (auto idx : sc.cav_indices) is_cav[idx] = true;

  FleetResult out;
  if (sc.connectivity_enabled) {
    out.pairing = pair_cavs(is_cav, sc.pairing_max_gap);
  } else {
    for (std::size_t i = sc.n_vehicles; i-- > 0;) {
      if (is_cav[i]) out.pairing.singles.push_back(i);
    }
  }

  std::vector<detail::ChainVehicle> vehicles(sc.n_vehicles);
  for (auto& veh : vehicles) {
    veh.role = Role::kHv;
    veh.hv = sc.hv;
  }
  for (const auto& pr : out.pairing.pairs) {
    vehicles[pr.head].role = Role::kCavHead;
    vehicles[pr.head].cav = sc.cav_head;
    vehicles[pr.head].partner = pr.tail;
    vehicles[pr.tail].role = Role::kCavTail;
    vehicles[pr.tail].cav = sc.cav_tail;
    vehicles[pr.tail].partner = pr.head;
  }
  for (auto idx : out.pairing.singles) {
    vehicles[idx].role = Role::kAv;
    vehicles[idx].cav = sc.cav_tail;
    vehicles[idx].cav.beta_cross = 0.0;
  }
  out.trajectory = detail::run_chain(std::move(vehicles), sc.v_star, sc.lead, sc.integration,
                                     sc.reverse_guard_gain);
  return out;
}

/// Fleet scenario with CAVs drawn by allocate_cavs.
inline FleetScenario make_fleet_scenario(double penetration, std::uint64_t seed,
                                         bool connectivity, FleetScenario base = {}) {
  base.rng_seed = seed;
  base.connectivity_enabled = connectivity;
  base.cav_indices = allocate_cavs(base.n_vehicles, penetration, seed);
  return base;
}

}  // namespace ccpair

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ccpair/linear_response.hpp"
#include "ccpair/metrics.hpp"
#include "ccpair/simulation.hpp"

using namespace ccpair;

namespace {

// x'(t) = -x(t - d), x = 1 on [-d, 0], written as a one-vehicle chain.
struct PureDelay {
  double d;
  std::size_t size() const { return 1; }
  double delay(std::size_t) const { return d; }
  double lead_speed(double) const { return 0.0; }
  double command(std::size_t, std::span<const double>, std::span<const double> v, double) const {
    return -v[0];
  }
  double accel(std::size_t, double u, double) const { return u; }
};

// Method-of-steps solution of x' = -x(t - d) on [0, 2d].
double pure_delay_exact(double t, double d) {
  if (t <= d) return 1.0 - t;
  return 1.0 - t + 0.5 * (t - d) * (t - d);
}

struct Blowup {
  std::size_t size() const { return 1; }
  double delay(std::size_t) const { return 0.1; }
  double lead_speed(double) const { return 0.0; }
  double command(std::size_t, std::span<const double>, std::span<const double> v, double) const {
    return v[0] * v[0];
  }
  double accel(std::size_t, double u, double) const { return 1e10 * u; }
};

double max_abs_diff(const std::vector<double>& a, double ref) {
  double out = 0.0;
  for (double x : a) out = std::max(out, std::abs(x - ref));
  return out;
}

}  // namespace

double pure_delay_error(double d, double dt) {
  const PureDelay model{d};
  const std::vector<double> x0{0.0}, v0{1.0};
  const auto rec = integrate_chain(model, x0, v0, {dt, 2.0 * d, 1});
  double err = 0.0;
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    err = std::max(err, std::abs(rec.v[0][k] - pure_delay_exact(rec.times[k], d)));
  }
  return err;
}

// The history kink at t = 0 limits the rate to second order.
TEST(DelayChain, PureDelayIntegerSteps) {
  const double e1 = pure_delay_error(0.5, 0.01);
  const double e2 = pure_delay_error(0.5, 0.005);
  EXPECT_LT(e1, 1e-5);
  EXPECT_GT(e1 / e2, 3.5);
}

TEST(DelayChain, PureDelayFractionalSteps) {
  const double e1 = pure_delay_error(0.5555, 0.01);
  const double e2 = pure_delay_error(0.5555, 0.005);
  EXPECT_LT(e1, 1e-5);
  EXPECT_GT(e1 / e2, 3.5);
}

TEST(DelayChain, NonFiniteStateThrows) {
  const std::vector<double> x0{0.0}, v0{1.0};
  try {
    integrate_chain(Blowup{}, x0, v0, {0.01, 10.0, 1});
    FAIL() << "expected integration failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrationFailure);
    EXPECT_NE(std::string(e.what()).find("t="), std::string::npos);
  }
}

TEST(ReverseGuard, Examples) {
  EXPECT_DOUBLE_EQ(reverse_guard(-7.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(reverse_guard(-7.0, 1.0, 10.0), -7.0);
  EXPECT_DOUBLE_EQ(reverse_guard(-7.0, 0.5, 10.0), -5.0);
}

TEST(SimulatePacket, EquilibriumIsFixedPoint) {
  PacketScenario sc;
  sc.lead = constant_lead(20.0);
  sc.integration.horizon = 200.0;
  const auto eq = compute_equilibrium(20.0, sc.cav_tail, sc.cav_head, sc.hv);
  const auto t = simulate_packet(sc);
  ASSERT_EQ(t.n_followers(), 7u);
  for (std::size_t i = 0; i < t.n_followers(); ++i) {
    EXPECT_LE(max_abs_diff(t.v[i], 20.0), 1e-9);
    const double h_ref = t.roles[i] == Role::kHv ? eq.h_star_hv : eq.h_star_tail;
    EXPECT_LE(max_abs_diff(t.h[i], h_ref), 1e-9);
  }
}

TEST(SimulatePacket, LayoutAndRoles) {
  PacketScenario sc;
  sc.integration.horizon = 5.0;
  const auto t = simulate_packet(sc);
  ASSERT_EQ(t.roles.size(), 8u);
  EXPECT_EQ(t.roles[0], Role::kCavTail);
  for (std::size_t i = 1; i <= 5; ++i) EXPECT_EQ(t.roles[i], Role::kHv);
  EXPECT_EQ(t.roles[6], Role::kCavHead);
  EXPECT_EQ(t.roles[7], Role::kLead);
  EXPECT_EQ(t.times.size(), 501u);
  for (const auto& s : t.v) EXPECT_EQ(s.size(), t.times.size());
  EXPECT_EQ(&t.speed(7), &t.v_lead);
}

TEST(SimulatePacket, Deterministic) {
  PacketScenario sc;
  sc.integration.horizon = 60.0;
  const auto a = simulate_packet(sc);
  const auto b = simulate_packet(sc);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.u, b.u);
}

TEST(SimulatePacket, StepHalvingConverges) {
  PacketScenario sc;
  sc.integration.horizon = 80.0;
  const auto coarse = simulate_packet(sc);
  sc.integration.dt = 0.005;
  const auto fine = simulate_packet(sc);
  ASSERT_EQ(fine.times.size(), 2 * coarse.times.size() - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.n_followers(); ++i) {
    for (std::size_t k = 0; k < coarse.times.size(); ++k) {
      worst = std::max(worst, std::abs(coarse.v[i][k] - fine.v[i][2 * k]));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(SimulatePacket, InputsRespectDelay) {
  PacketScenario sc;
  sc.lead.segments = {{30.0, -1.0}};  // acceleration step at t = 0
  sc.integration.horizon = 4.0;
  const auto t = simulate_packet(sc);
  const double dt = sc.integration.dt;
  // The head CAV reacts to the lead at once (its command), but its own
  // acceleration must stay zero until sigma has elapsed.
  const std::size_t head = sc.n_hv + 1;
  for (std::size_t k = 1; k < t.times.size(); ++k) {
    const double accel = (t.v[head][k] - t.v[head][k - 1]) / dt;
    if (t.times[k] <= sc.cav_head.sigma - dt) {
      EXPECT_NEAR(accel, 0.0, 1e-12) << "t=" << t.times[k];
    }
  }
  // The vehicle behind cannot move before two delays elapse.
  for (std::size_t k = 1; k < t.times.size(); ++k) {
    if (t.times[k] <= sc.cav_head.sigma + sc.hv.tau - dt) {
      EXPECT_NEAR(t.v[head - 1][k], 20.0, 1e-12) << "t=" << t.times[k];
    }
  }
  // And the head does move once the delay is over.
  EXPECT_LT(t.v[head].back(), 20.0 - 1e-3);
}

TEST(SimulatePacket, SpeedsStayNonNegative) {
  PacketScenario sc;
  sc.lead.segments = {{3.0, -7.0}, {40.0, 0.0}, {10.0, 2.0}};
  sc.integration.horizon = 120.0;
  sc.n_hv = 7;
  const auto t = simulate_packet(sc);
  for (const auto& s : t.v) EXPECT_GE(*std::min_element(s.begin(), s.end()), -1e-9);
}

TEST(SimulatePacket, CollisionIsReportedNotFatal) {
  PacketScenario sc;
  sc.lead.segments = {{2.0, -10.0}};
  sc.hv.limits.a_min = 1.0;
  sc.cav_tail.limits.a_min = 1.0;
  sc.cav_head.limits.a_min = 1.0;
  sc.integration.horizon = 60.0;
  const auto t = simulate_packet(sc);
  EXPECT_TRUE(t.collision);
  EXPECT_GT(t.collision_time, 0.0);
  EXPECT_EQ(t.times.back(), 60.0);
}

TEST(SimulatePacket, PairedCavsDampenLeadMotion) {
  PacketScenario paired;
  const auto tp = simulate_packet(paired);
  PacketScenario acc = paired;
  acc.cav_tail.beta_cross = 0.0;
  acc.cav_head.beta_cross = 0.0;
  const auto ta = simulate_packet(acc);
  const double lead_min = *std::min_element(tp.v_lead.begin(), tp.v_lead.end());
  const double paired_min = *std::min_element(tp.v[0].begin(), tp.v[0].end());
  const double acc_min = *std::min_element(ta.v[0].begin(), ta.v[0].end());
  EXPECT_GT(paired_min, lead_min + 0.5);
  EXPECT_NEAR(acc_min, lead_min, 0.3);
  EXPECT_FALSE(tp.collision);
}

TEST(SimulatePacket, MatchesLinearizationToSecondOrder) {
  auto deviation = [](double eps) {
    PacketScenario sc;
    sc.lead = sine_cycle_lead(20.0, eps, 14.0, 56);
    sc.integration.horizon = 100.0;
    const auto nl = simulate_packet(sc);
    const auto lin = simulate_linear_packet(linearize(sc), sc.lead, 20.0, sc.integration);
    double d = 0.0;
    for (std::size_t i = 0; i < nl.n_followers(); ++i) {
      for (std::size_t k = 0; k < nl.times.size(); ++k) {
        d = std::max(d, std::abs((nl.v[i][k] - 20.0) - lin.v[i][k]));
      }
    }
    return d;
  };
  const double d1 = deviation(0.1);
  const double d2 = deviation(0.05);
  EXPECT_LT(d1, 0.1 * 0.1);
  EXPECT_GE(d1 / d2, 4.0);
}

TEST(SimulatePacket, Validation) {
  PacketScenario sc;
  sc.integration.dt = 0.0;
  EXPECT_THROW(simulate_packet(sc), Error);
  sc = PacketScenario{};
  sc.integration.horizon = 0.5;
  EXPECT_THROW(simulate_packet(sc), Error);
  sc = PacketScenario{};
  sc.lead.v_init = 19.0;
  EXPECT_THROW(simulate_packet(sc), Error);
  sc = PacketScenario{};
  sc.v_star = 30.0;
  EXPECT_THROW(simulate_packet(sc), Error);
}

TEST(SimulateFleet, RolesFollowPairing) {
  FleetScenario sc;
  sc.n_vehicles = 12;
  sc.cav_indices = {0, 3, 4, 9, 11};
  sc.integration.horizon = 2.0;
  const auto res = simulate_fleet(sc);
  // Head to tail: 11 (C), 10 H, 9 (C) -> pair; 4 and 3 adjacent -> single 4,
  // then 3 pairs with 0.
  ASSERT_EQ(res.pairing.pairs.size(), 2u);
  EXPECT_EQ(res.pairing.pairs[0].head, 11u);
  EXPECT_EQ(res.pairing.pairs[0].tail, 9u);
  EXPECT_EQ(res.pairing.pairs[1].head, 3u);
  EXPECT_EQ(res.pairing.pairs[1].tail, 0u);
  EXPECT_EQ(res.pairing.singles, (std::vector<std::size_t>{4}));
  const auto& roles = res.trajectory.roles;
  EXPECT_EQ(roles[11], Role::kCavHead);
  EXPECT_EQ(roles[9], Role::kCavTail);
  EXPECT_EQ(roles[4], Role::kAv);
  EXPECT_EQ(roles[3], Role::kCavHead);
  EXPECT_EQ(roles[0], Role::kCavTail);
  EXPECT_EQ(roles[10], Role::kHv);
  EXPECT_EQ(roles[12], Role::kLead);
}

TEST(SimulateFleet, ConnectivityOffMakesSingles) {
  FleetScenario sc;
  sc.n_vehicles = 12;
  sc.cav_indices = {0, 3, 9, 11};
  sc.connectivity_enabled = false;
  sc.integration.horizon = 2.0;
  const auto res = simulate_fleet(sc);
  EXPECT_TRUE(res.pairing.pairs.empty());
  EXPECT_EQ(res.pairing.singles.size(), 4u);
  for (auto i : sc.cav_indices) EXPECT_EQ(res.trajectory.roles[i], Role::kAv);
}

TEST(SimulateFleet, DeterministicPerSeed) {
  FleetScenario base;
  base.integration.horizon = 60.0;
  const auto a = simulate_fleet(make_fleet_scenario(0.15, 7, true, base));
  const auto b = simulate_fleet(make_fleet_scenario(0.15, 7, true, base));
  EXPECT_EQ(a.trajectory.v, b.trajectory.v);
  EXPECT_EQ(a.pairing, b.pairing);
}

TEST(SimulateFleet, HumanOnlyTrafficAmplifies) {
  FleetScenario sc;
  const auto res = simulate_fleet(sc);
  const auto fm = fleet_metrics(res.trajectory);
  std::size_t above_two = 0;
  for (double g : fm.gamma) above_two += g > 2.0 ? 1 : 0;
  EXPECT_GT(above_two, 50u);
}

TEST(SimulateFleet, AllAccAttenuates) {
  FleetScenario sc = make_fleet_scenario(1.0, 1, false);
  const auto fm = fleet_metrics(simulate_fleet(sc).trajectory);
  for (std::size_t i = 1; i < fm.gamma.size(); ++i) EXPECT_LE(fm.gamma[i - 1], fm.gamma[i] + 1e-9);
  EXPECT_LT(fm.gamma.front(), 1.0);
}

TEST(SimulateFleet, ConnectivityShrinksTailDip) {
  FleetScenario base;
  const auto on = simulate_fleet(make_fleet_scenario(0.2, 3, true, base));
  const auto off = simulate_fleet(make_fleet_scenario(0.2, 3, false, base));
  const double dip_on = 20.0 - *std::min_element(on.trajectory.v[0].begin(), on.trajectory.v[0].end());
  const double dip_off =
      20.0 - *std::min_element(off.trajectory.v[0].begin(), off.trajectory.v[0].end());
  EXPECT_LT(dip_on, dip_off);
}

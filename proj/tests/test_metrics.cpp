#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ccpair/metrics.hpp"

using namespace ccpair;

namespace {

Trajectory toy(std::vector<std::vector<double>> v, std::vector<double> lead) {
  Trajectory t;
  for (std::size_t k = 0; k < lead.size(); ++k) t.times.push_back(0.1 * k);
  t.h.assign(v.size(), std::vector<double>(lead.size(), 30.0));
  t.u.assign(v.size(), std::vector<double>(lead.size(), 0.0));
  t.v = std::move(v);
  t.v_lead = std::move(lead);
  t.roles.assign(t.v.size(), Role::kHv);
  t.roles.push_back(Role::kLead);
  return t;
}

}  // namespace

TEST(Gamma, Examples) {
  const auto t = toy({{20, 21, 19.5, 20}, {20, 20, 23, 20}}, {20, 18, 20, 22});
  EXPECT_DOUBLE_EQ(max_fluctuation(t.v[0]), 1.0);
  EXPECT_DOUBLE_EQ(gamma(t, 0), 0.5);
  EXPECT_DOUBLE_EQ(gamma(t, 1), 1.5);
  EXPECT_DOUBLE_EQ(gamma(t, 2), 1.0);
  EXPECT_DOUBLE_EQ(gamma(t, 0, 1), 1.0 / 3.0);
  const auto fm = fleet_metrics(t);
  EXPECT_DOUBLE_EQ(fm.gamma_bar, 1.0);
  EXPECT_TRUE(fm.h2t_stable);
  EXPECT_EQ(fm.min_speed, (std::vector<double>{19.5, 20.0}));
}

TEST(Gamma, InvariantUnderConstantShiftAndCommonScale) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(50), lead(50);
    for (std::size_t k = 0; k < 50; ++k) {
      a[k] = 20.0 + noise(gen);
      lead[k] = 20.0 + noise(gen);
    }
    const double g = gamma(toy({a}, lead), 0);
    auto shifted = a, lead_shifted = lead, scaled = a, lead_scaled = lead;
    for (auto& x : shifted) x += 3.0;
    for (auto& x : lead_shifted) x -= 2.0;
    for (std::size_t k = 0; k < 50; ++k) {
      scaled[k] = 20.0 + 2.5 * (a[k] - 20.0);
      lead_scaled[k] = 20.0 + 2.5 * (lead[k] - 20.0);
    }
    EXPECT_NEAR(gamma(toy({shifted}, lead_shifted), 0), g, 1e-12);
    EXPECT_NEAR(gamma(toy({scaled}, lead_scaled), 0), g, 1e-12);
  }
}

TEST(Gamma, UndefinedForSteadyLead) {
  const auto t = toy({{20, 21}}, {20, 20});
  try {
    gamma(t, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedMetric);
  }
  EXPECT_THROW(fleet_metrics(t), Error);
  EXPECT_THROW(gamma(t, 5), Error);
}

TEST(MeanStd, Examples) {
  const auto m = mean_std({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_NEAR(m.stddev, std::sqrt(32.0 / 7.0), 1e-14);
  EXPECT_EQ(mean_std({3.0}).stddev, 0.0);
  EXPECT_THROW(mean_std({}), Error);
}

TEST(MeanStd, OrderInvariant) {
  std::vector<double> xs;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1e3);
  for (int k = 0; k < 101; ++k) xs.push_back(u(gen));
  const auto a = mean_std(xs);
  std::shuffle(xs.begin(), xs.end(), gen);
  const auto b = mean_std(xs);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
}

TEST(Ensemble, DeterministicAndThreadIndependent) {
  FleetScenario tmpl;
  tmpl.n_vehicles = 30;
  tmpl.integration.horizon = 60.0;
  tmpl.integration.record_stride = 5;
  const auto a = seed_ensemble(tmpl, 0.2, 4, 1);
  const auto b = seed_ensemble(tmpl, 0.2, 4, 4);
  ASSERT_EQ(a.members.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(a.members[k].seed, k + 1);
    EXPECT_EQ(a.members[k].gamma_0, b.members[k].gamma_0);
    EXPECT_EQ(a.members[k].gamma_bar, b.members[k].gamma_bar);
  }
  EXPECT_EQ(a.gamma_0.mean, b.gamma_0.mean);
  EXPECT_THROW(seed_ensemble(tmpl, 0.2, 0), Error);
}

TEST(Ensemble, NoCavsMakesSeedsIdentical) {
  FleetScenario tmpl;
  tmpl.n_vehicles = 20;
  tmpl.integration.horizon = 40.0;
  const auto r = seed_ensemble(tmpl, 0.0, 3);
  EXPECT_EQ(r.members[0].gamma_0, r.members[2].gamma_0);
  EXPECT_EQ(r.gamma_0.stddev, 0.0);
}

TEST(Ensemble, SummaryMatchesMembers) {
  std::vector<EnsembleMember> ms{{1, 0.5, 1.0, false}, {2, 1.5, 2.0, true}};
  const auto r = summarize(0.3, false, ms);
  EXPECT_DOUBLE_EQ(r.gamma_0.mean, 1.0);
  EXPECT_DOUBLE_EQ(r.gamma_bar.mean, 1.5);
  EXPECT_NEAR(r.gamma_0.stddev, std::sqrt(0.5), 1e-15);
  EXPECT_FALSE(r.connectivity);
}

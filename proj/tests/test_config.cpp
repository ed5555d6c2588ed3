#include <gtest/gtest.h>

#include "ccpair/config.hpp"

using namespace ccpair;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error for " << text;
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.mode, "packet");
  EXPECT_EQ(c.packet.n_hv, 5u);
  EXPECT_EQ(c.fleet.n_vehicles, 100u);
  EXPECT_EQ(c.ensemble.penetrations.size(), 21u);
  EXPECT_EQ(c.robust_region.n_values, (std::vector<std::size_t>{4, 5, 6, 7}));
  EXPECT_FALSE(c.fleet.cav_indices);
}

TEST(Config, DumpShowsCaseStudyValues) {
  const auto j = json::parse(dump_config(ScenarioConfig{}));
  EXPECT_EQ(j["cav_tail"]["sigma"], 0.6);
  EXPECT_EQ(j["cav_tail"]["alpha"], 0.4);
  EXPECT_EQ(j["cav_tail"]["beta"], 0.5);
  EXPECT_EQ(j["cav_tail"]["beta_cross"], 0.8);
  EXPECT_EQ(j["cav_head"]["beta_cross"], 0.1);
  EXPECT_EQ(j["hv"]["tau"], 0.8);
  EXPECT_EQ(j["hv"]["alpha"], 0.1);
  EXPECT_EQ(j["hv"]["beta"], 0.6);
  EXPECT_EQ(j["v_star"], 20.0);
  EXPECT_EQ(j["limits"]["a_min"], 7.0);
  EXPECT_EQ(j["limits"]["a_max"], 3.0);
}

TEST(Config, RoundTripIsIdempotent) {
  auto c = parse_config(R"({"mode": "fleet", "fleet": {"seed": 42, "cav_indices": [1, 5]},
                            "chart": {"kappa_hv": 0.7}, "lead": {"period": 12}})");
  const std::string once = dump_config(c);
  const std::string twice = dump_config(parse_config(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(c.fleet.seed, 42u);
  EXPECT_EQ(*c.fleet.cav_indices, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(*c.chart.kappa_hv, 0.7);
  EXPECT_EQ(c.lead.period, 12.0);
  EXPECT_EQ(once.back(), '\n');
}

TEST(Config, PartialObjectsMergeWithDefaults) {
  const auto c = parse_config(R"({"cav_head": {"alpha": 0.3}})");
  EXPECT_EQ(c.cav_head.alpha, 0.3);
  EXPECT_EQ(c.cav_head.beta, 0.5);
  EXPECT_EQ(c.cav_tail.alpha, 0.4);
}

TEST(Config, Rejections) {
  EXPECT_EQ(code_of(R"({"bogus": 1})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"fleet": {"sead": 1}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"integration": {"dt": 0}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"integration": {"dt": -0.1}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"packet": {"n_hv": -1}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"fleet": {"penetration": 1.2}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"mode": "convoy"})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"schema_version": 2})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"lead": {"shape": "square"}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"lead": {"v_init": 25}})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of(R"({"cav_tail": 3})"), ErrorCode::kConfig);
  EXPECT_EQ(code_of("[1, 2]"), ErrorCode::kConfig);
  EXPECT_EQ(code_of("{not json"), ErrorCode::kConfig);
  EXPECT_THROW(load_config("/nonexistent/cfg.json"), Error);
}

TEST(Config, BuildersCarryValues) {
  const auto c = parse_config(R"({"packet": {"n_hv": 3, "horizon": 50},
                                  "integration": {"dt": 0.02, "record_stride": 5},
                                  "lead": {"shape": "segments", "segments": [{"duration": 2, "accel": -1}]},
                                  "chart": {"kappa_head": 0.5, "tail_axis": {"n": 11}}})");
  const auto sc = packet_scenario(c);
  EXPECT_EQ(sc.n_hv, 3u);
  EXPECT_EQ(sc.integration.dt, 0.02);
  EXPECT_EQ(sc.integration.horizon, 50.0);
  EXPECT_EQ(sc.integration.record_stride, 5u);
  EXPECT_DOUBLE_EQ(evaluate_lead(sc.lead, 10.0), 18.0);
  const auto fp = chart_fingerprint(c, 6);
  EXPECT_EQ(fp.n_hv, 6u);
  EXPECT_EQ(fp.kappa_head, 0.5);
  EXPECT_NEAR(fp.kappa_hv, std::sqrt(12.0) / 5.0, 1e-12);
  EXPECT_EQ(chart_spec(c).tail.n, 11u);
  EXPECT_EQ(chart_spec(c).head.n, 151u);
}

TEST(Config, FleetScenarioUsesSeededAllocation) {
  const auto c = parse_config(R"({"mode": "fleet", "fleet": {"penetration": 0.1, "seed": 3}})");
  const auto a = fleet_scenario(c);
  EXPECT_EQ(a.cav_indices, allocate_cavs(100, 0.1, 3));
  const auto d = parse_config(R"({"fleet": {"cav_indices": [0, 2, 9]}})");
  EXPECT_EQ(fleet_scenario(d).cav_indices, (std::vector<std::size_t>{0, 2, 9}));
}

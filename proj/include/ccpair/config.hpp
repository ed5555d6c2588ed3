#pragma once

// JSON scenario configuration. Every key has a built-in default (the case
// study parameter set); a user document only lists overrides. Unknown keys
// are rejected and dump_config() yields a canonical, idempotent form.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "ccpair/charts.hpp"
#include "ccpair/error.hpp"
#include "ccpair/lead_profile.hpp"
#include "ccpair/models.hpp"
#include "ccpair/simulation.hpp"

namespace ccpair {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct LeadConfig {
  std::string shape = "sine_cycle";  // "sine_cycle" | "segments"
  double v_init = 20.0;
  double amplitude = 2.0;  // sine_cycle
  double period = 14.0;  // sine_cycle
  int pieces = 56;  // sine_cycle
  std::vector<LeadSegment> segments;  // segments

  LeadProfile profile(double v_max) const {
    LeadProfile p;
    if (shape == "sine_cycle") {
      p = sine_cycle_lead(v_init, amplitude, period, pieces);
    } else if (shape == "segments") {
      p.v_init = v_init;
      p.segments = segments;
    } else {
      throw Error(ErrorCode::kConfig, "lead.shape must be 'sine_cycle' or 'segments'");
    }
    p.v_max = v_max;
    p.validate();
    return p;
  }
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string mode = "packet";  // simulate: "packet" | "fleet"
  VehicleLimits limits;
  CavParams cav_tail = default_tail_cav();
  CavParams cav_head = default_head_cav();
  HvParams hv = default_hv();
  double v_star = kDefaultEquilibriumSpeed;
  LeadConfig lead;
  double dt = 0.01;
  std::size_t record_stride = 1;
  double reverse_guard_gain = 10.0;

  struct Packet {
    std::size_t n_hv = 5;
    double horizon = 120.0;
  } packet;

  struct Fleet {
    std::size_t n_vehicles = 100;
    double penetration = 0.2;
    std::optional<std::vector<std::size_t>> cav_indices;
    std::uint64_t seed = 1;
    std::size_t pairing_max_gap = 7;
    bool connectivity = true;
    double horizon = 300.0;
  } fleet;

  struct Chart {
    std::size_t n_hv = 4;
    GainAxis tail_axis;
    GainAxis head_axis;
    std::optional<double> kappa_hv;  // derived from v_star when absent
    std::optional<double> kappa_head;
    double contour_sigma_max = 5.0;
    double contour_omega_max = 50.0;
    double omega_max = 10.0;
    std::size_t n_frequencies = 1000;
  } chart;

  struct Penetration {
    std::vector<std::size_t> n_values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20};
    double kappa_lo = 0.05;
    double kappa_hi = 3.0;
    double tolerance = 1e-3;
  } penetration;

  struct Ensemble {
    std::vector<double> penetrations;
    std::size_t n_seeds = 20;
    std::vector<bool> connectivity = {true, false};
  } ensemble;

  struct Robust {
    std::vector<std::size_t> n_values = {4, 5, 6, 7};
  } robust_region;

  ScenarioConfig() {
    for (int k = 0; k <= 20; ++k) ensemble.penetrations.push_back(k / 20.0);
  }
};

// ---------------------------------------------------------------------------
// JSON mapping

inline json to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["mode"] = c.mode;
  j["limits"] = {{"a_min", c.limits.a_min},
                 {"a_max", c.limits.a_max},
                 {"v_max", c.limits.v_max},
                 {"h_st", c.limits.h_st}};
  auto cav = [](const CavParams& p) {
    return json{{"sigma", p.sigma},
                {"h_go", p.h_go},
                {"alpha", p.alpha},
                {"beta", p.beta},
                {"beta_cross", p.beta_cross}};
  };
  j["cav_tail"] = cav(c.cav_tail);
  j["cav_head"] = cav(c.cav_head);
  j["hv"] = {{"tau", c.hv.tau}, {"h_go", c.hv.h_go}, {"alpha", c.hv.alpha}, {"beta", c.hv.beta}};
  j["v_star"] = c.v_star;
  json segs = json::array();
  for (const auto& s : c.lead.segments) segs.push_back({{"duration", s.duration}, {"accel", s.accel}});
  j["lead"] = {{"shape", c.lead.shape},     {"v_init", c.lead.v_init},
               {"amplitude", c.lead.amplitude}, {"period", c.lead.period},
               {"pieces", c.lead.pieces},   {"segments", segs}};
  j["integration"] = {{"dt", c.dt},
                      {"record_stride", c.record_stride},
                      {"reverse_guard_gain", c.reverse_guard_gain}};
  j["packet"] = {{"n_hv", c.packet.n_hv}, {"horizon", c.packet.horizon}};
  j["fleet"] = {{"n_vehicles", c.fleet.n_vehicles},
                {"penetration", c.fleet.penetration},
                {"cav_indices", c.fleet.cav_indices ? json(*c.fleet.cav_indices) : json(nullptr)},
                {"seed", c.fleet.seed},
                {"pairing_max_gap", c.fleet.pairing_max_gap},
                {"connectivity", c.fleet.connectivity},
                {"horizon", c.fleet.horizon}};
  auto axis = [](const GainAxis& a) { return json{{"min", a.min}, {"max", a.max}, {"n", a.n}}; };
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  j["chart"] = {{"n_hv", c.chart.n_hv},
                {"tail_axis", axis(c.chart.tail_axis)},
                {"head_axis", axis(c.chart.head_axis)},
                {"kappa_hv", opt(c.chart.kappa_hv)},
                {"kappa_head", opt(c.chart.kappa_head)},
                {"contour_sigma_max", c.chart.contour_sigma_max},
                {"contour_omega_max", c.chart.contour_omega_max},
                {"omega_max", c.chart.omega_max},
                {"n_frequencies", c.chart.n_frequencies}};
  j["penetration"] = {{"n_values", c.penetration.n_values},
                      {"kappa_lo", c.penetration.kappa_lo},
                      {"kappa_hi", c.penetration.kappa_hi},
                      {"tolerance", c.penetration.tolerance}};
  j["ensemble"] = {{"penetrations", c.ensemble.penetrations},
                   {"n_seeds", c.ensemble.n_seeds},
                   {"connectivity", c.ensemble.connectivity}};
  j["robust_region"] = {{"n_values", c.robust_region.n_values}};
  return j;
}

namespace detail {

inline void check_keys(const json& user, const json& defaults, const std::string& path) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!defaults.contains(it.key())) throw Error(ErrorCode::kConfig, "unknown key '" + key + "'");
    const json& def = defaults.at(it.key());
    const json& val = it.value();
    if (def.is_object()) {
      if (!val.is_object()) throw Error(ErrorCode::kConfig, "key '" + key + "' must be an object");
      check_keys(val, def, key);
    }
  }
}

inline void merge(json& base, const json& user) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it.value().is_object() && base[it.key()].is_object()) {
      merge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& path) {
  try {
    const json& v = j.at(key);
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_unsigned()) {
        throw Error(ErrorCode::kConfig, "key '" + path + key + "' must be a non-negative integer");
      }
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, "key '" + path + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& path) {
  if (j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, path);
}

}  // namespace detail

/// Builds a config from a fully merged document.
inline ScenarioConfig from_json_document(const json& j) {
  using detail::get;
  using detail::get_opt;
  ScenarioConfig c;
  c.schema_version = get<int>(j, "schema_version", "");
  if (c.schema_version != kSchemaVersion) {
    throw Error(ErrorCode::kConfig, "unsupported schema_version " + std::to_string(c.schema_version));
  }
  c.mode = get<std::string>(j, "mode", "");
  const auto& lim = j.at("limits");
  c.limits = {get<double>(lim, "a_min", "limits."), get<double>(lim, "a_max", "limits."),
              get<double>(lim, "v_max", "limits."), get<double>(lim, "h_st", "limits.")};
  auto cav = [&](const char* name) {
    const auto& o = j.at(name);
    const std::string p = std::string(name) + ".";
    CavParams cp;
    cp.sigma = get<double>(o, "sigma", p);
    cp.h_go = get<double>(o, "h_go", p);
    cp.alpha = get<double>(o, "alpha", p);
    cp.beta = get<double>(o, "beta", p);
    cp.beta_cross = get<double>(o, "beta_cross", p);
    cp.limits = c.limits;
    return cp;
  };
  c.cav_tail = cav("cav_tail");
  c.cav_head = cav("cav_head");
  const auto& hv = j.at("hv");
  c.hv.tau = get<double>(hv, "tau", "hv.");
  c.hv.h_go = get<double>(hv, "h_go", "hv.");
  c.hv.alpha = get<double>(hv, "alpha", "hv.");
  c.hv.beta = get<double>(hv, "beta", "hv.");
  c.hv.limits = c.limits;
  c.v_star = get<double>(j, "v_star", "");

  const auto& lead = j.at("lead");
  c.lead.shape = get<std::string>(lead, "shape", "lead.");
  c.lead.v_init = get<double>(lead, "v_init", "lead.");
  c.lead.amplitude = get<double>(lead, "amplitude", "lead.");
  c.lead.period = get<double>(lead, "period", "lead.");
  c.lead.pieces = get<int>(lead, "pieces", "lead.");
  c.lead.segments.clear();
  for (const auto& s : lead.at("segments")) {
    detail::check_keys(s, json{{"duration", 0}, {"accel", 0}}, "lead.segments[]");
    c.lead.segments.push_back({get<double>(s, "duration", "lead.segments[]."),
                               get<double>(s, "accel", "lead.segments[].")});
  }

  const auto& integ = j.at("integration");
  c.dt = get<double>(integ, "dt", "integration.");
  c.record_stride = get<std::size_t>(integ, "record_stride", "integration.");
  c.reverse_guard_gain = get<double>(integ, "reverse_guard_gain", "integration.");

  const auto& pk = j.at("packet");
  c.packet.n_hv = get<std::size_t>(pk, "n_hv", "packet.");
  c.packet.horizon = get<double>(pk, "horizon", "packet.");

  const auto& fl = j.at("fleet");
  c.fleet.n_vehicles = get<std::size_t>(fl, "n_vehicles", "fleet.");
  c.fleet.penetration = get<double>(fl, "penetration", "fleet.");
  c.fleet.cav_indices = get_opt<std::vector<std::size_t>>(fl, "cav_indices", "fleet.");
  c.fleet.seed = get<std::uint64_t>(fl, "seed", "fleet.");
  c.fleet.pairing_max_gap = get<std::size_t>(fl, "pairing_max_gap", "fleet.");
  c.fleet.connectivity = get<bool>(fl, "connectivity", "fleet.");
  c.fleet.horizon = get<double>(fl, "horizon", "fleet.");

  const auto& ch = j.at("chart");
  auto axis = [&](const char* name) {
    const auto& a = ch.at(name);
    const std::string p = std::string("chart.") + name + ".";
    return GainAxis{get<double>(a, "min", p), get<double>(a, "max", p),
                    get<std::size_t>(a, "n", p)};
  };
  c.chart.n_hv = get<std::size_t>(ch, "n_hv", "chart.");
  c.chart.tail_axis = axis("tail_axis");
  c.chart.head_axis = axis("head_axis");
  c.chart.kappa_hv = get_opt<double>(ch, "kappa_hv", "chart.");
  c.chart.kappa_head = get_opt<double>(ch, "kappa_head", "chart.");
  c.chart.contour_sigma_max = get<double>(ch, "contour_sigma_max", "chart.");
  c.chart.contour_omega_max = get<double>(ch, "contour_omega_max", "chart.");
  c.chart.omega_max = get<double>(ch, "omega_max", "chart.");
  c.chart.n_frequencies = get<std::size_t>(ch, "n_frequencies", "chart.");

  const auto& pen = j.at("penetration");
  c.penetration.n_values = get<std::vector<std::size_t>>(pen, "n_values", "penetration.");
  c.penetration.kappa_lo = get<double>(pen, "kappa_lo", "penetration.");
  c.penetration.kappa_hi = get<double>(pen, "kappa_hi", "penetration.");
  c.penetration.tolerance = get<double>(pen, "tolerance", "penetration.");

  const auto& ens = j.at("ensemble");
  c.ensemble.penetrations = get<std::vector<double>>(ens, "penetrations", "ensemble.");
  c.ensemble.n_seeds = get<std::size_t>(ens, "n_seeds", "ensemble.");
  c.ensemble.connectivity = get<std::vector<bool>>(ens, "connectivity", "ensemble.");

  c.robust_region.n_values =
      get<std::vector<std::size_t>>(j.at("robust_region"), "n_values", "robust_region.");
  return c;
}

inline void validate(const ScenarioConfig& c);

/// Parses a JSON document of overrides on top of the defaults.
inline ScenarioConfig parse_config(const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("parse error: ") + e.what());
  }
  if (!user.is_object()) throw Error(ErrorCode::kConfig, "config root must be an object");
  json doc = to_json(ScenarioConfig{});
  detail::check_keys(user, doc, "");
  detail::merge(doc, user);
  ScenarioConfig c = from_json_document(doc);
  validate(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form: sorted keys, two-space indent, trailing newline.
inline std::string dump_config(const ScenarioConfig& c) { return to_json(c).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Scenario builders

inline LeadProfile lead_profile(const ScenarioConfig& c) { return c.lead.profile(c.limits.v_max); }

inline IntegrationSettings integration_settings(const ScenarioConfig& c, double horizon) {
  return {c.dt, horizon, c.record_stride};
}

inline PacketScenario packet_scenario(const ScenarioConfig& c) {
  PacketScenario sc;
  sc.n_hv = c.packet.n_hv;
  sc.cav_tail = c.cav_tail;
  sc.cav_head = c.cav_head;
  sc.hv = c.hv;
  sc.v_star = c.v_star;
  sc.lead = lead_profile(c);
  sc.integration = integration_settings(c, c.packet.horizon);
  sc.reverse_guard_gain = c.reverse_guard_gain;
  return sc;
}

inline FleetScenario fleet_template(const ScenarioConfig& c) {
  FleetScenario sc;
  sc.n_vehicles = c.fleet.n_vehicles;
  sc.rng_seed = c.fleet.seed;
  sc.pairing_max_gap = c.fleet.pairing_max_gap;
  sc.connectivity_enabled = c.fleet.connectivity;
  sc.cav_tail = c.cav_tail;
  sc.cav_head = c.cav_head;
  sc.hv = c.hv;
  sc.v_star = c.v_star;
  sc.lead = lead_profile(c);
  sc.integration = integration_settings(c, c.fleet.horizon);
  sc.reverse_guard_gain = c.reverse_guard_gain;
  return sc;
}

/// Fleet scenario; CAVs come from cav_indices when given, otherwise from
/// allocate_cavs with the configured penetration and seed.
inline FleetScenario fleet_scenario(const ScenarioConfig& c) {
  FleetScenario sc = fleet_template(c);
  if (c.fleet.cav_indices) {
    sc.cav_indices = *c.fleet.cav_indices;
  } else {
    sc = make_fleet_scenario(c.fleet.penetration, c.fleet.seed, c.fleet.connectivity, sc);
  }
  return sc;
}

inline PacketFingerprint chart_fingerprint(const ScenarioConfig& c, std::size_t n_hv) {
  auto sc = packet_scenario(c);
  sc.n_hv = n_hv;
  auto fp = fingerprint(sc);
  if (c.chart.kappa_hv) fp.kappa_hv = *c.chart.kappa_hv;
  if (c.chart.kappa_head) fp.kappa_head = *c.chart.kappa_head;
  return fp;
}

inline ChartSpec chart_spec(const ScenarioConfig& c) {
  ChartSpec spec;
  spec.tail = c.chart.tail_axis;
  spec.head = c.chart.head_axis;
  spec.contour.sigma_max = c.chart.contour_sigma_max;
  spec.contour.omega_max = c.chart.contour_omega_max;
  spec.omega_max = c.chart.omega_max;
  spec.n_frequencies = c.chart.n_frequencies;
  return spec;
}

inline void validate(const ScenarioConfig& c) {
  if (c.mode != "packet" && c.mode != "fleet") {
    throw Error(ErrorCode::kConfig, "mode must be 'packet' or 'fleet'");
  }
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfig) throw;
      throw Error(ErrorCode::kConfig, e.what());
    }
  };
  wrap([&] { packet_scenario(c).validate(); });
  wrap([&] {
    auto f = fleet_template(c);
    if (c.fleet.cav_indices) f.cav_indices = *c.fleet.cav_indices;
    f.validate();
    if (!(c.fleet.penetration >= 0.0 && c.fleet.penetration <= 1.0)) {
      throw Error(ErrorCode::kConfig, "fleet.penetration must lie in [0, 1]");
    }
  });
  wrap([&] { chart_spec(c).validate(); });
  if (!(c.penetration.kappa_lo > 0.0) || !(c.penetration.kappa_hi > c.penetration.kappa_lo) ||
      !(c.penetration.tolerance > 0.0)) {
    throw Error(ErrorCode::kConfig, "penetration.kappa_lo/hi/tolerance are inconsistent");
  }
  if (c.penetration.n_values.empty()) throw Error(ErrorCode::kConfig, "penetration.n_values is empty");
  if (c.ensemble.n_seeds < 1) throw Error(ErrorCode::kConfig, "ensemble.n_seeds must be >= 1");
  for (double p : c.ensemble.penetrations) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kConfig, "ensemble penetrations must lie in [0, 1]");
  }
  if (c.robust_region.n_values.empty()) throw Error(ErrorCode::kConfig, "robust_region.n_values is empty");
}

}  // namespace ccpair

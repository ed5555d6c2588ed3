#pragma once

// Command implementations behind the ccpair executable. Each returns the
// process exit status; hard errors propagate as exceptions.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ccpair/charts.hpp"
#include "ccpair/config.hpp"
#include "ccpair/io.hpp"
#include "ccpair/metrics.hpp"
#include "ccpair/simulation.hpp"

namespace ccpair {

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarning = 2;

struct CommandOptions {
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool strict = false;
  std::ostream* log = &std::cout;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path.string() + "'");
  return os;
}

inline std::filesystem::path out_dir(const std::string& out) {
  std::filesystem::path dir(out.empty() ? "." : out);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace detail

/// Writes the trajectory CSV to opts.out and metadata to opts.out + ".meta.json".
inline int cmd_simulate(ScenarioConfig cfg, const CommandOptions& opts) {
  if (opts.out.empty()) throw Error(ErrorCode::kInvalidArgument, "simulate needs --out");
  if (opts.seed) cfg.fleet.seed = *opts.seed;
  auto& log = *opts.log;
  Trajectory traj;
  std::optional<PairingAssignment> pairing;
  if (cfg.mode == "packet") {
    traj = simulate_packet(packet_scenario(cfg));
  } else {
    auto res = simulate_fleet(fleet_scenario(cfg));
    traj = std::move(res.trajectory);
    pairing = std::move(res.pairing);
  }
  {
    auto os = detail::open_output(opts.out);
    write_trajectory_csv(os, traj);
  }
  {
    auto os = detail::open_output(opts.out + ".meta.json");
    os << trajectory_metadata(traj, pairing ? &*pairing : nullptr, to_json(cfg)).dump(2) << '\n';
  }
  log << "samples " << traj.times.size() << ", vehicles " << traj.n_followers() << " + lead\n";
  bool warn = false;
  try {
    log << "gamma_0 " << format_number(gamma(traj, 0)) << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUndefinedMetric) throw;
    log << "warning: " << e.what() << '\n';
    warn = true;
  }
  if (traj.collision) {
    log << "warning: collision of vehicle " << traj.collision_vehicle << " at t="
        << format_number(traj.collision_time) << '\n';
    warn = true;
  }
  return warn && opts.strict ? kExitWarning : kExitOk;
}

/// Writes chart.csv, boundaries.csv and frequency_response.csv (at the
/// configured cross gains) into the output directory.
inline int cmd_chart(const ScenarioConfig& cfg, const CommandOptions& opts) {
  const auto dir = detail::out_dir(opts.out);
  const auto fp = chart_fingerprint(cfg, cfg.chart.n_hv);
  const auto spec = chart_spec(cfg);
  const auto chart = build_chart(fp, spec, opts.jobs);
  {
    auto os = detail::open_output(dir / "chart.csv");
    write_chart_csv(os, chart.grid);
  }
  {
    auto os = detail::open_output(dir / "boundaries.csv");
    write_boundaries_csv(os, chart.boundaries);
  }
  {
    auto os = detail::open_output(dir / "frequency_response.csv");
    write_frequency_response_csv(
        os, frequency_response(linearize(fp), composite_frequency_grid(spec.omega_max, spec.n_frequencies)));
  }
  *opts.log << "stable cells " << chart.grid.stable_count() << " of " << chart.grid.cells.size()
            << '\n';
  return kExitOk;
}

inline int cmd_penetration(const ScenarioConfig& cfg, const CommandOptions& opts) {
  if (opts.out.empty()) throw Error(ErrorCode::kInvalidArgument, "penetration needs --out");
  const KappaSearch search{cfg.penetration.kappa_lo, cfg.penetration.kappa_hi,
                           cfg.penetration.tolerance};
  auto sc = packet_scenario(cfg);
  std::vector<PenetrationSample> rows;
  for (std::size_t n : cfg.penetration.n_values) {
    sc.n_hv = n;
    auto fp = chart_fingerprint(cfg, n);
    PenetrationSample s;
    s.n_hv = n;
    s.p = penetration(n);
    s.kappa_max = max_kappa(fp, chart_spec(cfg), search, opts.jobs);
    if (s.kappa_max) s.h_bar_min = average_headway(n, *s.kappa_max, sc);
    *opts.log << "N=" << n << " p=" << format_number(s.p) << " kappa_max="
              << (s.kappa_max ? format_number(*s.kappa_max) : std::string("none")) << '\n';
    rows.push_back(s);
  }
  auto os = detail::open_output(opts.out);
  write_penetration_csv(os, rows);
  return kExitOk;
}

/// Per-seed rows for every penetration and connectivity mode, then summary
/// rows.
inline int cmd_ensemble(const ScenarioConfig& cfg, const CommandOptions& opts) {
  if (opts.out.empty()) throw Error(ErrorCode::kInvalidArgument, "ensemble needs --out");
  auto tmpl = fleet_template(cfg);
  std::vector<EnsembleResult> results;
  bool warn = false;
  for (bool conn : cfg.ensemble.connectivity) {
    for (double p : cfg.ensemble.penetrations) {
      tmpl.connectivity_enabled = conn;
      try {
        results.push_back(seed_ensemble(tmpl, p, cfg.ensemble.n_seeds, opts.jobs));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedMetric) throw;
        *opts.log << "warning: penetration " << format_number(p) << ": " << e.what() << '\n';
        warn = true;
        continue;
      }
      const auto& r = results.back();
      *opts.log << "p=" << format_number(p) << " connectivity=" << conn
                << " gamma_0=" << format_number(r.gamma_0.mean)
                << " gamma_bar=" << format_number(r.gamma_bar.mean) << '\n';
      for (const auto& m : r.members) warn = warn || m.collision;
    }
  }
  auto os = detail::open_output(opts.out);
  write_metrics_header(os);
  for (const auto& r : results) write_metrics_rows(os, r);
  for (const auto& r : results) write_metrics_summary(os, r);
  return warn && opts.strict ? kExitWarning : kExitOk;
}

/// Writes robust_region.csv (mask) and chart_N<n>.csv per N.
inline int cmd_robust_region(const ScenarioConfig& cfg, const CommandOptions& opts) {
  const auto dir = detail::out_dir(opts.out);
  const auto spec = chart_spec(cfg);
  std::vector<ChartGrid> grids;
  for (std::size_t n : cfg.robust_region.n_values) {
    grids.push_back(classify_grid(linearize(chart_fingerprint(cfg, n)), spec, opts.jobs));
    auto os = detail::open_output(dir / ("chart_N" + std::to_string(n) + ".csv"));
    write_chart_csv(os, grids.back());
  }
  const auto mask = robust_gain_region(grids);
  auto os = detail::open_output(dir / "robust_region.csv");
  write_mask_csv(os, spec, mask);
  *opts.log << "robust cells " << std::count(mask.begin(), mask.end(), true) << " of "
            << mask.size() << '\n';
  return kExitOk;
}

}  // namespace ccpair

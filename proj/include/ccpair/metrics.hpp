#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ccpair/charts.hpp"
#include "ccpair/error.hpp"
#include "ccpair/simulation.hpp"

namespace ccpair {

inline double max_fluctuation(const std::vector<double>& series) {
  if (series.empty()) throw Error(ErrorCode::kInvalidArgument, "empty speed series");
  double out = 0.0;
  for (double x : series) out = std::max(out, std::abs(x - series.front()));
  return out;
}

/// Peak speed fluctuation of vehicle i relative to that of vehicle `lead`.
inline double gamma(const Trajectory& traj, std::size_t i, std::size_t lead) {
  const double denom = max_fluctuation(traj.speed(lead));
  if (!(denom > 0.0)) throw Error(ErrorCode::kUndefinedMetric, "lead speed never fluctuates");
  return max_fluctuation(traj.speed(i)) / denom;
}

inline double gamma(const Trajectory& traj, std::size_t i) {
  return gamma(traj, i, traj.lead_index());
}

struct FleetMetrics {
  std::vector<double> gamma;  // followers, index 0 = tail
  double gamma_bar = 0.0;
  bool h2t_stable = false;
  bool collision = false;
  std::vector<double> min_speed;
};

inline FleetMetrics fleet_metrics(const Trajectory& traj) {
  const std::size_t m = traj.n_followers();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "trajectory has no followers");
  const double denom = max_fluctuation(traj.v_lead);
  if (!(denom > 0.0)) throw Error(ErrorCode::kUndefinedMetric, "lead speed never fluctuates");
  FleetMetrics fm;
  fm.gamma.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    fm.gamma.push_back(max_fluctuation(traj.v[i]) / denom);
    fm.min_speed.push_back(*std::min_element(traj.v[i].begin(), traj.v[i].end()));
  }
  fm.gamma_bar = std::accumulate(fm.gamma.begin(), fm.gamma.end(), 0.0) / static_cast<double>(m);
  fm.h2t_stable = fm.gamma.front() < 1.0;
  fm.collision = traj.collision;
  return fm;
}

struct EnsembleMember {
  std::uint64_t seed = 0;
  double gamma_0 = 0.0;
  double gamma_bar = 0.0;
  bool collision = false;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorCode::kInvalidArgument, "no samples");
  // Sorting makes the summary independent of sample order.
  std::vector<double> sorted(xs);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : sorted) ss += (x - mean) * (x - mean);
  return {mean, sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

struct EnsembleResult {
  double penetration = 0.0;
  bool connectivity = true;
  std::vector<EnsembleMember> members;
  MeanStd gamma_0;
  MeanStd gamma_bar;
};

inline EnsembleResult summarize(double penetration, bool connectivity,
                                std::vector<EnsembleMember> members) {
  EnsembleResult r;
  r.penetration = penetration;
  r.connectivity = connectivity;
  std::vector<double> g0, gb;
  for (const auto& m : members) {
    g0.push_back(m.gamma_0);
    gb.push_back(m.gamma_bar);
  }
  r.gamma_0 = mean_std(g0);
  r.gamma_bar = mean_std(gb);
  r.members = std::move(members);
  return r;
}

/// Seeds 1..n_seeds: allocate CAVs, simulate the fleet, reduce to metrics.
/// The template's cav_indices and rng_seed are replaced per seed.
inline EnsembleResult seed_ensemble(const FleetScenario& tmpl, double penetration,
                                    std::size_t n_seeds, unsigned jobs = 1) {
  if (n_seeds < 1) throw Error(ErrorCode::kInvalidArgument, "ensemble needs at least one seed");
  std::vector<EnsembleMember> members(n_seeds);
  parallel_for(n_seeds, jobs, [&](std::size_t k) {
    const std::uint64_t seed = k + 1;
    const auto sc = make_fleet_scenario(penetration, seed, tmpl.connectivity_enabled, tmpl);
    const auto res = simulate_fleet(sc);
    const auto fm = fleet_metrics(res.trajectory);
    members[k] = {seed, fm.gamma.front(), fm.gamma_bar, fm.collision};
  });
  return summarize(penetration, tmpl.connectivity_enabled, std::move(members));
}

}  // namespace ccpair

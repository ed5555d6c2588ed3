#pragma once

// CSV and metadata writers. Numbers use the shortest round-trip form so
// output is byte-identical across runs.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccpair/boundaries.hpp"
#include "ccpair/charts.hpp"
#include "ccpair/linear.hpp"
#include "ccpair/metrics.hpp"
#include "ccpair/pairing.hpp"
#include "ccpair/simulation.hpp"

namespace ccpair {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t m = traj.n_followers();
  os << "t";
  for (std::size_t i = 0; i < m; ++i) os << ",h_" << i << ",v_" << i << ",u_" << i;
  os << ",v_lead\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_number(traj.times[k]);
    for (std::size_t i = 0; i < m; ++i) {
      os << ',' << format_number(traj.h[i][k]) << ',' << format_number(traj.v[i][k]) << ','
         << format_number(traj.u[i][k]);
    }
    os << ',' << format_number(traj.v_lead[k]) << '\n';
  }
}

inline nlohmann::json pairing_json(const PairingAssignment& pa) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : pa.pairs) {
    pairs.push_back({{"head", p.head}, {"tail", p.tail}, {"n_between", p.n_between}});
  }
  return {{"pairs", pairs}, {"singles", pa.singles}};
}

/// Sidecar metadata: roles, optional pairing, collision status, config echo.
inline nlohmann::json trajectory_metadata(const Trajectory& traj, const PairingAssignment* pairing,
                                          const nlohmann::json& config) {
  nlohmann::json roles = nlohmann::json::array();
  for (auto r : traj.roles) roles.push_back(to_string(r));
  nlohmann::json meta;
  meta["roles"] = roles;
  meta["lead_index"] = traj.lead_index();
  meta["samples"] = traj.times.size();
  meta["collision"] = {{"occurred", traj.collision}};
  if (traj.collision) {
    meta["collision"]["time"] = traj.collision_time;
    meta["collision"]["vehicle"] = traj.collision_vehicle;
  }
  if (pairing) meta["pairing"] = pairing_json(*pairing);
  meta["config"] = config;
  return meta;
}

inline void write_frequency_response_csv(std::ostream& os, const FrequencyResponse& fr) {
  os << "omega,re_G,im_G,abs_G\n";
  for (std::size_t k = 0; k < fr.omega.size(); ++k) {
    os << format_number(fr.omega[k]) << ',' << format_number(fr.g[k].real()) << ','
       << format_number(fr.g[k].imag()) << ',' << format_number(std::abs(fr.g[k])) << '\n';
  }
}

/// Verdict codes 0/1/2 (plant unstable / string unstable / stable); one row
/// per beta_cross_head value, one column per beta_cross_tail value.
inline void write_chart_csv(std::ostream& os, const ChartGrid& grid) {
  os << "beta_head_cross";
  for (std::size_t i = 0; i < grid.spec.tail.n; ++i) os << ',' << format_number(grid.spec.tail.value(i));
  os << '\n';
  for (std::size_t j = 0; j < grid.spec.head.n; ++j) {
    os << format_number(grid.spec.head.value(j));
    for (std::size_t i = 0; i < grid.spec.tail.n; ++i) os << ',' << static_cast<int>(grid.at(i, j));
    os << '\n';
  }
}

/// Mask rows in the same layout as write_chart_csv (1 = inside).
inline void write_mask_csv(std::ostream& os, const ChartSpec& spec, const std::vector<bool>& mask) {
  os << "beta_head_cross";
  for (std::size_t i = 0; i < spec.tail.n; ++i) os << ',' << format_number(spec.tail.value(i));
  os << '\n';
  for (std::size_t j = 0; j < spec.head.n; ++j) {
    os << format_number(spec.head.value(j));
    for (std::size_t i = 0; i < spec.tail.n; ++i) os << ',' << (mask[j * spec.tail.n + i] ? 1 : 0);
    os << '\n';
  }
}

/// Branches are separated by a row of NaNs. The family label carries its
/// wave number, e.g. "string_nonzero:K=0.0981747704246810".
inline void write_boundaries_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves) {
  os << "kind,param,beta_tail_cross,beta_head_cross\n";
  for (const auto& c : curves) {
    std::string label = to_string(c.kind);
    if (c.kind == BoundaryKind::kStringNonzero) label += ":K=" + format_number(c.wave_number);
    for (std::size_t b = 0; b < c.branches.size(); ++b) {
      if (b > 0) os << label << ",nan,nan,nan\n";
      for (std::size_t k = 0; k < c.branches[b].size(); ++k) {
        os << label << ',' << format_number(c.branch_params[b][k]) << ','
           << format_number(c.branches[b][k].beta_cross_tail) << ','
           << format_number(c.branches[b][k].beta_cross_head) << '\n';
      }
    }
  }
}

inline void write_penetration_csv(std::ostream& os, const std::vector<PenetrationSample>& rows) {
  os << "N,p,kappa_max,h_bar_min\n";
  for (const auto& r : rows) {
    os << r.n_hv << ',' << format_number(r.p) << ','
       << (r.kappa_max ? format_number(*r.kappa_max) : std::string("nan")) << ','
       << format_number(r.h_bar_min) << '\n';
  }
}

inline void write_metrics_header(std::ostream& os) {
  os << "seed,penetration,connectivity,gamma_0,gamma_bar,collisions\n";
}

inline void write_metrics_rows(std::ostream& os, const EnsembleResult& r) {
  for (const auto& m : r.members) {
    os << m.seed << ',' << format_number(r.penetration) << ',' << (r.connectivity ? 1 : 0) << ','
       << format_number(m.gamma_0) << ',' << format_number(m.gamma_bar) << ','
       << (m.collision ? 1 : 0) << '\n';
  }
}

/// Summary rows use "mean" and "std" in the seed column; the collisions
/// column then holds the count of colliding seeds.
inline void write_metrics_summary(std::ostream& os, const EnsembleResult& r) {
  std::size_t collisions = 0;
  for (const auto& m : r.members) collisions += m.collision ? 1 : 0;
  os << "mean," << format_number(r.penetration) << ',' << (r.connectivity ? 1 : 0) << ','
     << format_number(r.gamma_0.mean) << ',' << format_number(r.gamma_bar.mean) << ','
     << collisions << '\n';
  os << "std," << format_number(r.penetration) << ',' << (r.connectivity ? 1 : 0) << ','
     << format_number(r.gamma_0.stddev) << ',' << format_number(r.gamma_bar.stddev) << ','
     << collisions << '\n';
}

}  // namespace ccpair

#pragma once

// Stability charts over the cross-gain plane, robust gain regions, and the
// maximum-gradient / penetration sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ccpair/boundaries.hpp"
#include "ccpair/linear.hpp"

namespace ccpair {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
/// by index, so the outcome does not depend on scheduling. The first
/// exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

enum class Verdict { kPlantUnstable = 0, kPlantStableStringUnstable = 1, kPlantAndStringStable = 2 };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPlantUnstable: return "plant_unstable";
    case Verdict::kPlantStableStringUnstable: return "plant_stable_string_unstable";
    case Verdict::kPlantAndStringStable: return "plant_and_string_stable";
  }
  return "?";
}

struct GainAxis {
  double min = -0.5;
  double max = 2.0;
  std::size_t n = 151;

  double value(std::size_t k) const {
    return min + (max - min) * static_cast<double>(k) / static_cast<double>(n - 1);
  }

  bool operator==(const GainAxis&) const = default;
};

struct ChartSpec {
  GainAxis tail;  // beta_cross_tail
  GainAxis head;  // beta_cross_head
  Contour contour{};
  double omega_max = 10.0;
  std::size_t n_frequencies = 1000;

  void validate() const {
    if (tail.n < 2 || head.n < 2) throw Error(ErrorCode::kInvalidArgument, "chart resolution must be >= 2");
    if (!(tail.max > tail.min) || !(head.max > head.min)) {
      throw Error(ErrorCode::kInvalidArgument, "chart axes must be increasing");
    }
  }

  GainBox box() const { return {tail.min, tail.max, head.min, head.max}; }
};

struct ChartGrid {
  ChartSpec spec;
  PacketFingerprint fingerprint;
  std::vector<Verdict> cells;  // row-major: row = head index, column = tail index

  Verdict at(std::size_t i_tail, std::size_t i_head) const {
    return cells[i_head * spec.tail.n + i_tail];
  }

  std::size_t count(Verdict v) const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), v));
  }

  std::size_t stable_count() const { return count(Verdict::kPlantAndStringStable); }
};

/// Reference classification of one gain pair.
inline Verdict classify_point(const GainPoint& g, const LinearizedPacket& base,
                              const ChartSpec& spec = {}) {
  const auto lin = with_cross_gains(base, g.beta_cross_tail, g.beta_cross_head);
  const auto plant = plant_stability_test(lin, spec.contour);
  if (plant.status != PlantStatus::kStable) return Verdict::kPlantUnstable;
  const bool string_ok = p_of_omega(lin, 0.0) > 0.0 &&
                         string_stability_margin(lin, spec.omega_max, spec.n_frequencies).sup < 1.0;
  return string_ok ? Verdict::kPlantAndStringStable : Verdict::kPlantStableStringUnstable;
}

/// Fast classifier for many gain pairs sharing one fingerprint. Both the
/// characteristic function and the head-to-tail numerator are affine in the
/// cross gains, so their gain-independent parts are tabulated once.
class GainPlaneEvaluator {
 public:
  GainPlaneEvaluator(const LinearizedPacket& lin, const ChartSpec& spec)
      : base_(with_cross_gains(lin, 0.0, 0.0)),
        spec_(spec),
        path_(spec.contour),
        grid_(composite_frequency_grid(spec.omega_max, spec.n_frequencies)),
        hv_zeros_(hv_rhp_zeros(base_, path_)),
        zero_line_(zero_frequency_line(base_)) {
    contour_terms_.reserve(path_.points.size());
    for (const auto& s : path_.points) contour_terms_.push_back(terms(s));
    freq_terms_.reserve(grid_.size());
    for (double w : grid_) freq_terms_.push_back(terms(cplx{0.0, w}));
  }

  bool string_stable(const GainPoint& g) const {
    if (!(zero_line_.p * g.beta_cross_tail + zero_line_.q * g.beta_cross_head + zero_line_.r >
          0.0)) {
      return false;
    }
    return margin(g).sup < 1.0;
  }

  MarginResult margin(const GainPoint& g) const {
    const double x = g.beta_cross_tail;
    const double y = g.beta_cross_head;
    const auto lin = with_cross_gains(base_, x, y);
    std::size_t k = 0;
    bool on_grid = true;
    // Grid samples come from the table, refinement points from the direct path.
    auto mag = [&](double w) {
      if (on_grid && k < grid_.size() && w == grid_[k]) {
        const auto& t = freq_terms_[k++];
        const cplx den = t.a + x * t.b + y * t.c;
        const cplx num = (t.x + x * t.s) * t.n1;
        const double ad = std::abs(den);
        if (!(ad > kPoleThreshold)) return std::numeric_limits<double>::infinity();
        return std::abs(num) / ad;
      }
      on_grid = false;
      const auto parts = head_to_tail_parts(cplx{0.0, w}, lin);
      const double ad = std::abs(parts.den);
      if (!(ad > kPoleThreshold)) return std::numeric_limits<double>::infinity();
      return std::abs(parts.num) / ad;
    };
    return detail::sweep_maximum(mag, grid_);
  }

  PlantVerdict plant(const GainPoint& g) const {
    const double x = g.beta_cross_tail;
    const double y = g.beta_cross_head;
    std::vector<cplx> vals(contour_terms_.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const auto& t = contour_terms_[k];
      vals[k] = t.a + x * t.b + y * t.c;
    }
    auto f = [&](cplx s) {
      const auto t = terms(s);
      return t.a + x * t.b + y * t.c;
    };
    return plant_verdict_from(f, path_, vals, hv_zeros_, base_.n_hv);
  }

  Verdict classify(const GainPoint& g) const {
    const auto p = plant(g);
    if (p.status != PlantStatus::kStable) return Verdict::kPlantUnstable;
    return string_stable(g) ? Verdict::kPlantAndStringStable : Verdict::kPlantStableStringUnstable;
  }

  /// True when both tests pass; the cheaper string test runs first.
  bool stable(const GainPoint& g) const {
    return string_stable(g) && plant(g).status == PlantStatus::kStable;
  }

  const LinearizedPacket& base() const { return base_; }

 private:
  struct Terms {
    cplx a, b, c;  // den = a + x b + y c
    cplx x, s, n1;  // num = (x + beta_cross_tail s) n1
  };

  Terms terms(cplx s) const {
    const cplx nan{std::numeric_limits<double>::quiet_NaN(), 0.0};
    cplx gam;
    try {
      gam = hv_chain(s, base_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPole) throw;
      return {nan, nan, nan, nan, s, nan};
    }
    const cplx d0 = tail_denominator(s, base_);
    const cplx d1 = head_denominator(s, base_);
    const cplx x = (base_.beta_tail * s + base_.tail.xi) * gam;
    return {d0 * d1, s * d1, s * (d0 - x), x, s, base_.beta_head * s + base_.head.xi};
  }

  LinearizedPacket base_;
  ChartSpec spec_;
  ContourPath path_;
  std::vector<double> grid_;
  std::optional<int> hv_zeros_;
  ZeroFrequencyLine zero_line_;
  std::vector<Terms> contour_terms_;
  std::vector<Terms> freq_terms_;
};

inline ChartGrid classify_grid(const LinearizedPacket& lin, const ChartSpec& spec,
                               unsigned jobs = 1) {
  spec.validate();
  const GainPlaneEvaluator eval(lin, spec);
  ChartGrid grid;
  grid.spec = spec;
  grid.cells.resize(spec.tail.n * spec.head.n);
  parallel_for(grid.cells.size(), jobs, [&](std::size_t idx) {
    const std::size_t i_head = idx / spec.tail.n;
    const std::size_t i_tail = idx % spec.tail.n;
    grid.cells[idx] = eval.classify({spec.tail.value(i_tail), spec.head.value(i_head)});
  });
  return grid;
}

struct Chart {
  ChartGrid grid;
  std::vector<BoundaryCurve> boundaries;
};

/// Classified grid plus boundary curves clipped to the chart window widened
/// by half its span on each side.
inline Chart build_chart(const PacketFingerprint& fp, const ChartSpec& spec = {},
                         unsigned jobs = 1, const BoundarySweep& sweep = {}) {
  const auto lin = linearize(fp);
  Chart chart;
  chart.grid = classify_grid(lin, spec, jobs);
  chart.grid.fingerprint = fp;
  chart.boundaries = trace_all_boundaries(lin, spec.box().expanded(0.5), sweep);
  return chart;
}

/// Cellwise AND of the stable verdicts of charts sharing one spec.
inline std::vector<bool> robust_gain_region(const std::vector<ChartGrid>& charts) {
  if (charts.empty()) throw Error(ErrorCode::kInvalidArgument, "no charts to intersect");
  const auto& spec = charts.front().spec;
  std::vector<bool> mask(charts.front().cells.size(), true);
  for (const auto& c : charts) {
    if (!(c.spec.tail == spec.tail) || !(c.spec.head == spec.head)) {
      throw Error(ErrorCode::kInvalidArgument, "charts must share the same grid");
    }
    for (std::size_t k = 0; k < mask.size(); ++k) {
      mask[k] = mask[k] && c.cells[k] == Verdict::kPlantAndStringStable;
    }
  }
  return mask;
}

/// True when some grid cell is plant and string stable.
inline bool stable_region_nonempty(const LinearizedPacket& lin, const ChartSpec& spec,
                                   unsigned jobs = 1) {
  spec.validate();
  const GainPlaneEvaluator eval(lin, spec);
  const std::size_t n = spec.tail.n * spec.head.n;
  std::atomic<bool> found{false};
  parallel_for(n, jobs, [&](std::size_t idx) {
    if (found.load(std::memory_order_relaxed)) return;
    const GainPoint g{spec.tail.value(idx % spec.tail.n), spec.head.value(idx / spec.tail.n)};
    if (eval.stable(g)) found.store(true);
  });
  return found.load();
}

struct KappaSearch {
  double lo = 0.05;
  double hi = 3.0;
  double tolerance = 1e-3;
};

/// Largest head-CAV gradient with a non-empty stable region (bisection);
/// nullopt when even the lower bound has none.
inline std::optional<double> max_kappa(const PacketFingerprint& fp, const ChartSpec& spec = {},
                                       const KappaSearch& search = {}, unsigned jobs = 1) {
  auto ok = [&](double kappa) {
    auto f = fp;
    f.kappa_head = kappa;
    return stable_region_nonempty(linearize(f), spec, jobs);
  };
  double lo = search.lo;
  double hi = search.hi;
  if (!ok(lo)) return std::nullopt;
  if (ok(hi)) return hi;
  while (hi - lo > search.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct PenetrationSample {
  std::size_t n_hv = 0;
  double p = 0.0;
  std::optional<double> kappa_max;
  double h_bar_min = std::numeric_limits<double>::quiet_NaN();  // [m]
};

inline double penetration(std::size_t n_hv) { return 2.0 / (static_cast<double>(n_hv) + 2.0); }

/// Minimum average packet headway when the head CAV uses gradient
/// `kappa_head` and everyone else sits at the scenario equilibrium.
inline double average_headway(std::size_t n_hv, double kappa_head, const PacketScenario& sc) {
  const double p = penetration(n_hv);
  const auto eq = compute_equilibrium(sc.v_star, sc.cav_tail, sc.cav_head, sc.hv);
  const double h_st = sc.cav_head.limits.h_st;
  return 0.5 * p * (eq.h_star_tail + sc.v_star / kappa_head + h_st) + (1.0 - p) * eq.h_star_hv;
}

inline std::vector<PenetrationSample> penetration_curve(const std::vector<std::size_t>& n_values,
                                                        const PacketScenario& sc,
                                                        const ChartSpec& spec = {},
                                                        const KappaSearch& search = {},
                                                        unsigned jobs = 1) {
  if (n_values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty N range");
  std::vector<PenetrationSample> out;
  for (std::size_t n : n_values) {
    auto s = sc;
    s.n_hv = n;
    PenetrationSample sample;
    sample.n_hv = n;
    sample.p = penetration(n);
    sample.kappa_max = max_kappa(fingerprint(s), spec, search, jobs);
    if (sample.kappa_max) sample.h_bar_min = average_headway(n, *sample.kappa_max, sc);
    out.push_back(sample);
  }
  return out;
}

}  // namespace ccpair

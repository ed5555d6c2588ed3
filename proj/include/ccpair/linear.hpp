#pragma once

// Linearized packet model around the uniform equilibrium: link transfer
// functions, the head-to-tail transfer function, its characteristic
// function, the string-stability margin and an argument-principle test for
// plant stability.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ccpair/error.hpp"
#include "ccpair/models.hpp"
#include "ccpair/simulation.hpp"

namespace ccpair {

using cplx = std::complex<double>;

inline constexpr double kPoleThreshold = 1e-14;

struct CombinedParams {
  double xi = 0.0;  // alpha * kappa
  double eta = 0.0;  // alpha + beta
  double zeta = 0.0;  // alpha + 2 beta - 2 kappa

  bool operator==(const CombinedParams&) const = default;
};

inline CombinedParams combine_params(double alpha, double beta, double kappa) {
  return {alpha * kappa, alpha + beta, alpha + 2.0 * beta - 2.0 * kappa};
}

/// Everything the linear analysis depends on. Gradients are given directly so
/// that analyses can override them (e.g. a rounded kappa_hv).
struct PacketFingerprint {
  std::size_t n_hv = 4;
  double sigma = 0.6;
  double tau = 0.8;
  double alpha_tail = 0.4, beta_tail = 0.5, kappa_tail = 0.6;
  double alpha_head = 0.4, beta_head = 0.5, kappa_head = 0.6;
  double alpha_hv = 0.1, beta_hv = 0.6, kappa_hv = 0.7;
  double beta_cross_tail = 0.8;
  double beta_cross_head = 0.1;

  bool operator==(const PacketFingerprint&) const = default;
};

/// Fingerprint of a packet scenario at its equilibrium.
inline PacketFingerprint fingerprint(const PacketScenario& sc) {
  Equilibrium eq;
  try {
    eq = compute_equilibrium(sc.v_star, sc.cav_tail, sc.cav_head, sc.hv);
  } catch (const Error& e) {
    throw Error(ErrorCode::kLinearizationInvalid, e.what());
  }
  PacketFingerprint fp;
  fp.n_hv = sc.n_hv;
  if (sc.cav_tail.sigma != sc.cav_head.sigma) {
    throw Error(ErrorCode::kLinearizationInvalid, "both CAVs must share the same delay");
  }
  fp.sigma = sc.cav_tail.sigma;
  fp.tau = sc.hv.tau;
  fp.alpha_tail = sc.cav_tail.alpha;
  fp.beta_tail = sc.cav_tail.beta;
  fp.kappa_tail = eq.kappa_tail;
  fp.alpha_head = sc.cav_head.alpha;
  fp.beta_head = sc.cav_head.beta;
  fp.kappa_head = eq.kappa_head;
  fp.alpha_hv = sc.hv.alpha;
  fp.beta_hv = sc.hv.beta;
  fp.kappa_hv = eq.kappa_hv;
  fp.beta_cross_tail = sc.cav_tail.beta_cross;
  fp.beta_cross_head = sc.cav_head.beta_cross;
  return fp;
}

/// Default case-study fingerprint with kappa_hv derived at v* = 20 m/s.
inline PacketFingerprint default_fingerprint(std::size_t n_hv) {
  PacketScenario sc;
  sc.n_hv = n_hv;
  return fingerprint(sc);
}

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

/// State x_i = (headway, speed) deviations of each vehicle.
struct LinearizedPacket {
  Mat2 a{}, a_tail{}, a_hv{}, a_head{};
  Vec2 b{}, b_tail{}, b_tail_cross{}, b_hv{}, b_head{}, b_head_cross{};
  Vec2 c{0.0, 1.0};
  double sigma = 0.0;
  double tau = 0.0;
  std::size_t n_hv = 0;
  double beta_cross_tail = 0.0;
  double beta_cross_head = 0.0;
  CombinedParams tail, head, hv;
  double alpha_tail = 0.0, beta_tail = 0.0, kappa_tail = 0.0;
  double alpha_head = 0.0, beta_head = 0.0, kappa_head = 0.0;
  double alpha_hv = 0.0, beta_hv = 0.0, kappa_hv = 0.0;
};

inline LinearizedPacket linearize(const PacketFingerprint& fp) {
  const double values[] = {fp.sigma,     fp.tau,        fp.alpha_tail,     fp.beta_tail,
                           fp.kappa_tail, fp.alpha_head, fp.beta_head,      fp.kappa_head,
                           fp.alpha_hv,  fp.beta_hv,    fp.kappa_hv,       fp.beta_cross_tail,
                           fp.beta_cross_head};
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "fingerprint must be finite");
  }
  if (fp.sigma < 0.0 || fp.tau < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "delays must be non-negative");
  }
  if (!(fp.kappa_tail > 0.0) || !(fp.kappa_head > 0.0) || !(fp.kappa_hv > 0.0)) {
    throw Error(ErrorCode::kLinearizationInvalid, "range-policy gradients must be positive");
  }
  LinearizedPacket lin;
  lin.sigma = fp.sigma;
  lin.tau = fp.tau;
  lin.n_hv = fp.n_hv;
  lin.beta_cross_tail = fp.beta_cross_tail;
  lin.beta_cross_head = fp.beta_cross_head;
  lin.alpha_tail = fp.alpha_tail;
  lin.beta_tail = fp.beta_tail;
  lin.kappa_tail = fp.kappa_tail;
  lin.alpha_head = fp.alpha_head;
  lin.beta_head = fp.beta_head;
  lin.kappa_head = fp.kappa_head;
  lin.alpha_hv = fp.alpha_hv;
  lin.beta_hv = fp.beta_hv;
  lin.kappa_hv = fp.kappa_hv;
  lin.tail = combine_params(fp.alpha_tail, fp.beta_tail, fp.kappa_tail);
  lin.head = combine_params(fp.alpha_head, fp.beta_head, fp.kappa_head);
  lin.hv = combine_params(fp.alpha_hv, fp.beta_hv, fp.kappa_hv);

  lin.a = {{{0.0, -1.0}, {0.0, 0.0}}};
  lin.a_tail = {{{0.0, 0.0}, {lin.tail.xi, -(lin.tail.eta + fp.beta_cross_tail)}}};
  lin.a_hv = {{{0.0, 0.0}, {lin.hv.xi, -lin.hv.eta}}};
  lin.a_head = {{{0.0, 0.0}, {lin.head.xi, -(lin.head.eta + fp.beta_cross_head)}}};
  lin.b = {1.0, 0.0};
  lin.b_tail = {0.0, fp.beta_tail};
  lin.b_tail_cross = {0.0, fp.beta_cross_tail};
  lin.b_hv = {0.0, fp.beta_hv};
  lin.b_head = {0.0, fp.beta_head};
  lin.b_head_cross = {0.0, fp.beta_cross_head};
  return lin;
}

inline LinearizedPacket linearize(const PacketScenario& sc) { return linearize(fingerprint(sc)); }

/// Copy of `lin` with different cross gains.
inline LinearizedPacket with_cross_gains(LinearizedPacket lin, double beta_cross_tail,
                                         double beta_cross_head) {
  lin.beta_cross_tail = beta_cross_tail;
  lin.beta_cross_head = beta_cross_head;
  lin.a_tail[1][1] = -(lin.tail.eta + beta_cross_tail);
  lin.a_head[1][1] = -(lin.head.eta + beta_cross_head);
  lin.b_tail_cross = {0.0, beta_cross_tail};
  lin.b_head_cross = {0.0, beta_cross_head};
  return lin;
}

enum class LinkKind { kTailPred, kTailCross, kHv, kHeadPred, kHeadCross };

namespace detail {

inline cplx check_pole(cplx den, const char* what) {
  if (!(std::abs(den) > kPoleThreshold)) {
    throw Error(ErrorCode::kPole, std::string(what) + " denominator vanishes");
  }
  return den;
}

// s^2 e^{s d} + k1 s + k0
inline cplx delayed_quadratic(cplx s, double d, double k1, double k0) {
  return s * s * std::exp(s * d) + k1 * s + k0;
}

}  // namespace detail

/// Denominator of the tail CAV's link transfer functions.
inline cplx tail_denominator(cplx s, const LinearizedPacket& lin) {
  return detail::delayed_quadratic(s, lin.sigma, lin.tail.eta + lin.beta_cross_tail, lin.tail.xi);
}

inline cplx head_denominator(cplx s, const LinearizedPacket& lin) {
  return detail::delayed_quadratic(s, lin.sigma, lin.head.eta + lin.beta_cross_head, lin.head.xi);
}

/// Characteristic function of a single human driver.
inline cplx hv_denominator(cplx s, const LinearizedPacket& lin) {
  return detail::delayed_quadratic(s, lin.tau, lin.hv.eta, lin.hv.xi);
}

inline cplx link_tf(LinkKind kind, cplx s, const LinearizedPacket& lin) {
  switch (kind) {
    case LinkKind::kTailPred:
      return (lin.beta_tail * s + lin.tail.xi) /
             detail::check_pole(tail_denominator(s, lin), "tail link");
    case LinkKind::kTailCross:
      return lin.beta_cross_tail * s / detail::check_pole(tail_denominator(s, lin), "tail link");
    case LinkKind::kHv:
      return (lin.beta_hv * s + lin.hv.xi) / detail::check_pole(hv_denominator(s, lin), "HV link");
    case LinkKind::kHeadPred:
      return (lin.beta_head * s + lin.head.xi) /
             detail::check_pole(head_denominator(s, lin), "head link");
    case LinkKind::kHeadCross:
      return lin.beta_cross_head * s / detail::check_pole(head_denominator(s, lin), "head link");
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown link kind");
}

/// c (sI - a - a_d e^{-sd})^{-1} (b_0 + b_d e^{-sd}), evaluated from the
/// coefficient matrices.
inline cplx link_tf_matrix(LinkKind kind, cplx s, const LinearizedPacket& lin) {
  const Mat2* ad = nullptr;
  Vec2 b0{0.0, 0.0};
  const Vec2* bd = nullptr;
  double d = 0.0;
  switch (kind) {
    case LinkKind::kTailPred: ad = &lin.a_tail; b0 = lin.b; bd = &lin.b_tail; d = lin.sigma; break;
    case LinkKind::kTailCross: ad = &lin.a_tail; bd = &lin.b_tail_cross; d = lin.sigma; break;
    case LinkKind::kHv: ad = &lin.a_hv; b0 = lin.b; bd = &lin.b_hv; d = lin.tau; break;
    case LinkKind::kHeadPred: ad = &lin.a_head; b0 = lin.b; bd = &lin.b_head; d = lin.sigma; break;
    case LinkKind::kHeadCross: ad = &lin.a_head; bd = &lin.b_head_cross; d = lin.sigma; break;
  }
  const cplx e = std::exp(-s * d);
  cplx m[2][2];
  cplx rhs[2];
  for (int r = 0; r < 2; ++r) {
    for (int k = 0; k < 2; ++k) {
      m[r][k] = (r == k ? s : cplx{0.0}) - lin.a[r][k] - (*ad)[r][k] * e;
    }
    rhs[r] = b0[r] + (*bd)[r] * e;
  }
  const cplx det = detail::check_pole(m[0][0] * m[1][1] - m[0][1] * m[1][0], "matrix link");
  // x = m^{-1} rhs
  const cplx x0 = (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det;
  const cplx x1 = (-m[1][0] * rhs[0] + m[0][0] * rhs[1]) / det;
  return lin.c[0] * x0 + lin.c[1] * x1;
}

inline cplx hv_chain(cplx s, const LinearizedPacket& lin) {
  if (lin.n_hv == 0) return 1.0;
  const cplx t = link_tf(LinkKind::kHv, s, lin);
  cplx out = 1.0;
  for (std::size_t i = 0; i < lin.n_hv; ++i) out *= t;
  return out;
}

inline cplx head_to_tail_tf(cplx s, const LinearizedPacket& lin) {
  const cplx forward =
      link_tf(LinkKind::kTailPred, s, lin) * hv_chain(s, lin) + link_tf(LinkKind::kTailCross, s, lin);
  const cplx den = detail::check_pole(1.0 - forward * link_tf(LinkKind::kHeadCross, s, lin),
                                      "head-to-tail");
  return forward * link_tf(LinkKind::kHeadPred, s, lin) / den;
}

/// G = num / den with den the characteristic function of the packet (HV
/// chain kept as a rational factor).
struct TransferParts {
  cplx num;
  cplx den;
};

inline TransferParts head_to_tail_parts(cplx s, const LinearizedPacket& lin) {
  const cplx x = (lin.beta_tail * s + lin.tail.xi) * hv_chain(s, lin);
  const cplx forward = x + lin.beta_cross_tail * s;
  const cplx den =
      tail_denominator(s, lin) * head_denominator(s, lin) - forward * lin.beta_cross_head * s;
  const cplx num = forward * (lin.beta_head * s + lin.head.xi);
  return {num, den};
}

inline cplx characteristic_function(cplx s, const LinearizedPacket& lin) {
  return head_to_tail_parts(s, lin).den;
}

// ---------------------------------------------------------------------------
// Frequency sweeps

/// Composite grid: log-spaced up to 1 rad/s, linear above.
inline std::vector<double> composite_frequency_grid(double omega_max = 10.0,
                                                    std::size_t n_samples = 1000) {
  if (!(omega_max > 0.0) || n_samples < 4) {
    throw Error(ErrorCode::kInvalidArgument, "frequency grid needs omega_max > 0 and samples");
  }
  const double lo = 1e-3;
  const double knee = std::min(1.0, omega_max);
  const std::size_t n_log = omega_max > 1.0 ? n_samples * 2 / 5 : n_samples;
  const std::size_t n_lin = n_samples - n_log;
  std::vector<double> grid;
  grid.reserve(n_samples);
  const double lo_eff = std::min(lo, knee / 10.0);
  for (std::size_t k = 0; k < n_log; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n_log - 1);
    grid.push_back(lo_eff * std::pow(knee / lo_eff, f));
  }
  for (std::size_t k = 1; k <= n_lin; ++k) {
    grid.push_back(knee + (omega_max - knee) * static_cast<double>(k) / static_cast<double>(n_lin));
  }
  return grid;
}

struct FrequencyResponse {
  std::vector<double> omega;
  std::vector<cplx> g;
  std::vector<double> hv_chain_real;
  std::vector<double> hv_chain_imag;

  std::vector<double> magnitude() const {
    std::vector<double> out;
    out.reserve(g.size());
    for (const auto& z : g) out.push_back(std::abs(z));
    return out;
  }
};

inline FrequencyResponse frequency_response(const LinearizedPacket& lin,
                                            const std::vector<double>& grid) {
  FrequencyResponse fr;
  double prev = 0.0;
  for (double w : grid) {
    if (!(w > prev)) throw Error(ErrorCode::kInvalidArgument, "grid must be positive, increasing");
    prev = w;
    const cplx s{0.0, w};
    const cplx gam = hv_chain(s, lin);
    fr.omega.push_back(w);
    fr.g.push_back(head_to_tail_tf(s, lin));
    fr.hv_chain_real.push_back(gam.real());
    fr.hv_chain_imag.push_back(gam.imag());
  }
  return fr;
}

struct MarginResult {
  double sup = 0.0;
  double argmax = 0.0;

  bool string_stable_margin() const { return sup < 1.0; }
};

namespace detail {

/// Golden-section maximisation of f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, int iters = 60) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int k = 0; k < iters && b - a > 1e-12 * std::max(1.0, b); ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Supremum of `mag` over the grid, refining every local maximum that comes
/// within `window` of the grid maximum. `mag` returns +inf at poles.
template <class Mag>
MarginResult sweep_maximum(Mag&& mag, const std::vector<double>& grid, double window = 0.05) {
  std::vector<double> vals(grid.size());
  MarginResult best{0.0, grid.front()};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    vals[k] = mag(grid[k]);
    if (!std::isfinite(vals[k])) return {std::numeric_limits<double>::infinity(), grid[k]};
    if (vals[k] > best.sup) best = {vals[k], grid[k]};
  }
  const double cutoff = best.sup - window;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (vals[k] < cutoff) continue;
    const bool left_ok = k == 0 || vals[k] >= vals[k - 1];
    const bool right_ok = k + 1 == grid.size() || vals[k] >= vals[k + 1];
    if (!left_ok || !right_ok) continue;
    const double a = k == 0 ? grid[0] : grid[k - 1];
    const double b = k + 1 == grid.size() ? grid[k] : grid[k + 1];
    if (!(b > a)) continue;
    const auto [w, f] = golden_max(mag, a, b);
    if (!std::isfinite(f)) return {std::numeric_limits<double>::infinity(), w};
    if (f > best.sup) best = {f, w};
  }
  return best;
}

}  // namespace detail

/// sup_{omega > 0} |G(j omega)| over the grid, refined by golden-section
/// search. A pole on the grid gives +inf.
inline MarginResult string_stability_margin(const LinearizedPacket& lin,
                                            const std::vector<double>& grid) {
  auto mag = [&](double w) {
    try {
      return std::abs(head_to_tail_tf(cplx{0.0, w}, lin));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kPole) return std::numeric_limits<double>::infinity();
      throw;
    }
  };
  return detail::sweep_maximum(mag, grid);
}

inline MarginResult string_stability_margin(const LinearizedPacket& lin, double omega_max = 10.0,
                                            std::size_t n_samples = 1000) {
  return string_stability_margin(lin, composite_frequency_grid(omega_max, n_samples));
}

/// Coefficients of the omega = 0 string-stability condition
/// P(0) = p beta_cross_tail + q beta_cross_head + r.
struct ZeroFrequencyLine {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

inline ZeroFrequencyLine zero_frequency_line(const LinearizedPacket& lin) {
  const double n = static_cast<double>(lin.n_hv);
  const double xi0 = lin.tail.xi;
  const double xi1 = lin.head.xi;
  ZeroFrequencyLine line;
  line.p = 2.0 * xi1 * xi1 * lin.alpha_tail * (1.0 + n * lin.kappa_tail / lin.kappa_hv);
  line.q = -line.p * xi0 / xi1;
  line.r = xi1 * xi1 * xi0 * xi0 * n * lin.alpha_hv * lin.hv.zeta / (lin.hv.xi * lin.hv.xi) +
           xi1 * xi1 * lin.alpha_tail * lin.tail.zeta + xi0 * xi0 * lin.alpha_head * lin.head.zeta;
  return line;
}

/// P(omega) = (|den|^2 - |num|^2) / omega^2; positive iff |G(j omega)| < 1.
/// omega = 0 uses the exact limit.
inline double p_of_omega(const LinearizedPacket& lin, double omega) {
  if (!(omega >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "omega must be non-negative");
  if (omega == 0.0) {
    const auto line = zero_frequency_line(lin);
    return line.p * lin.beta_cross_tail + line.q * lin.beta_cross_head + line.r;
  }
  const auto parts = head_to_tail_parts(cplx{0.0, omega}, lin);
  return (std::norm(parts.den) - std::norm(parts.num)) / (omega * omega);
}

// ---------------------------------------------------------------------------
// Plant stability

struct Contour {
  double sigma_max = 5.0;
  double omega_max = 50.0;
  std::size_t n_right = 200;
  std::size_t n_top = 400;
  std::size_t n_axis = 3000;
};

enum class PlantStatus { kStable, kUnstable, kBoundary };

struct PlantVerdict {
  PlantStatus status = PlantStatus::kBoundary;
  int zero_count = 0;  // right-half-plane zeros, meaningful unless boundary
  double min_abs_axis = 0.0;  // min |D| along the imaginary-axis segment
};

/// Sample points along the upper half of the rectangle boundary:
/// sigma_max -> sigma_max + j omega_max -> j omega_max -> 0.
struct ContourPath {
  std::vector<cplx> points;
  std::size_t axis_begin = 0;  // first index on the imaginary axis

  explicit ContourPath(const Contour& c) {
    if (!(c.sigma_max > 0.0) || !(c.omega_max > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "contour bounds must be positive");
    }
    for (std::size_t k = 0; k < c.n_right; ++k) {
      points.emplace_back(c.sigma_max, c.omega_max * static_cast<double>(k) / c.n_right);
    }
    for (std::size_t k = 0; k < c.n_top; ++k) {
      points.emplace_back(c.sigma_max * (1.0 - static_cast<double>(k) / c.n_top), c.omega_max);
    }
    axis_begin = points.size();
    // Quadratic spacing concentrates samples at low frequency.
    for (std::size_t k = 0; k <= c.n_axis; ++k) {
      const double f = 1.0 - static_cast<double>(k) / c.n_axis;
      points.emplace_back(0.0, c.omega_max * f * f);
    }
  }
};

namespace detail {

inline constexpr double kArgStep = std::numbers::pi / 8.0;
inline constexpr int kMaxRefineDepth = 40;
inline constexpr double kContourZero = 1e-12;
inline constexpr double kAxisZero = 1e-9;

struct WindingResult {
  double delta_arg = 0.0;
  bool ambiguous = false;
  double min_abs_axis = std::numeric_limits<double>::infinity();
};

template <class F>
bool refine_arg(F& f, cplx s0, cplx s1, cplx d0, cplx d1, int depth, bool on_axis,
                WindingResult& out) {
  const double step = std::arg(d1 / d0);
  if (std::abs(step) <= kArgStep) {
    out.delta_arg += step;
    return true;
  }
  if (depth >= kMaxRefineDepth) return false;
  const cplx sm = 0.5 * (s0 + s1);
  const cplx dm = f(sm);
  const double am = std::abs(dm);
  if (!std::isfinite(am) || am < kContourZero) return false;
  if (on_axis) out.min_abs_axis = std::min(out.min_abs_axis, am);
  return refine_arg(f, s0, sm, d0, dm, depth + 1, on_axis, out) &&
         refine_arg(f, sm, s1, dm, d1, depth + 1, on_axis, out);
}

/// Accumulated argument change of f along the path, given precomputed values.
template <class F>
WindingResult path_winding(F&& f, const ContourPath& path, const std::vector<cplx>& values) {
  WindingResult out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double a = std::abs(values[k]);
    if (!std::isfinite(a) || a < kContourZero) {
      out.ambiguous = true;
      return out;
    }
    if (k >= path.axis_begin) out.min_abs_axis = std::min(out.min_abs_axis, a);
  }
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const bool on_axis = k >= path.axis_begin;
    if (!refine_arg(f, path.points[k], path.points[k + 1], values[k], values[k + 1], 0, on_axis,
                    out)) {
      out.ambiguous = true;
      return out;
    }
  }
  return out;
}

/// Number of zeros (counted by the conjugate-symmetric upper path) or nullopt.
inline std::optional<int> zeros_from_arg(double delta_arg) {
  const double turns = delta_arg / std::numbers::pi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.25) return std::nullopt;
  return static_cast<int>(rounded);
}

}  // namespace detail

/// Winding-based zero count of the HV characteristic function; the
/// head-to-tail characteristic function has its zeros as poles (N-fold).
inline std::optional<int> hv_rhp_zeros(const LinearizedPacket& lin, const ContourPath& path) {
  auto f = [&](cplx s) { return hv_denominator(s, lin); };
  std::vector<cplx> vals;
  vals.reserve(path.points.size());
  for (const auto& s : path.points) vals.push_back(f(s));
  const auto w = detail::path_winding(f, path, vals);
  if (w.ambiguous || w.min_abs_axis < detail::kAxisZero) return std::nullopt;
  return detail::zeros_from_arg(w.delta_arg);
}

/// Plant verdict from the characteristic-function values along `path`.
/// `f` evaluates the same function at refinement points; `hv_zeros` is the
/// HV-chain correction (nullopt when the HV loop itself is on a boundary).
template <class F>
PlantVerdict plant_verdict_from(F&& f, const ContourPath& path, const std::vector<cplx>& values,
                                std::optional<int> hv_zeros, std::size_t n_hv) {
  PlantVerdict v;
  const auto w = detail::path_winding(f, path, values);
  v.min_abs_axis = w.min_abs_axis;
  if (w.ambiguous || w.min_abs_axis < detail::kAxisZero || (n_hv > 0 && !hv_zeros)) {
    v.status = PlantStatus::kBoundary;
    return v;
  }
  const auto zeros = detail::zeros_from_arg(w.delta_arg);
  if (!zeros) {
    v.status = PlantStatus::kBoundary;
    return v;
  }
  v.zero_count = *zeros + static_cast<int>(n_hv) * (n_hv > 0 ? *hv_zeros : 0);
  v.status = v.zero_count == 0 ? PlantStatus::kStable : PlantStatus::kUnstable;
  return v;
}

/// Argument-principle count of characteristic roots in
/// [0, sigma_max] x [-omega_max, omega_max].
inline PlantVerdict plant_stability_test(const LinearizedPacket& lin, const Contour& contour = {}) {
  const ContourPath path(contour);
  auto f = [&](cplx s) {
    try {
      return characteristic_function(s, lin);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPole) throw;
      return cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
  };
  std::vector<cplx> vals;
  vals.reserve(path.points.size());
  for (const auto& s : path.points) vals.push_back(f(s));
  return plant_verdict_from(f, path, vals, hv_rhp_zeros(lin, path), lin.n_hv);
}

}  // namespace ccpair

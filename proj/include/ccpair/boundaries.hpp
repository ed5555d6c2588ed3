#pragma once

// Closed-form stability boundaries in the (beta_cross_tail, beta_cross_head)
// plane. Each boundary point solves a 2x2 linear system
//   p1 x + q1 y + r1 = 0,   p2 x + q2 y + r2 = 0
// for x = beta_cross_tail, y = beta_cross_head.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ccpair/linear.hpp"

namespace ccpair {

struct GainPoint {
  double beta_cross_tail = 0.0;
  double beta_cross_head = 0.0;
};

struct BoundaryCoefficients {
  double p1 = 0.0, q1 = 0.0, r1 = 0.0, w1 = 0.0;
  double p2 = 0.0, q2 = 0.0, r2 = 0.0, w2 = 0.0;
};

/// Coefficients of the Hopf condition D(j Omega) = 0 (real and imaginary
/// parts); w1, w2 carry the HV-chain contribution.
inline BoundaryCoefficients boundary_coefficients(double omega, const LinearizedPacket& lin) {
  const cplx gam = hv_chain(cplx{0.0, omega}, lin);
  const double gr = gam.real();
  const double gi = gam.imag();
  const double s = std::sin(omega * lin.sigma);
  const double c = std::cos(omega * lin.sigma);
  const double w = omega;
  const double w2p = w * w;
  const double w3p = w2p * w;
  const double w4p = w2p * w2p;
  const double xi0 = lin.tail.xi, eta0 = lin.tail.eta;
  const double xi1 = lin.head.xi, eta1 = lin.head.eta;
  const double b0 = lin.beta_tail;

  BoundaryCoefficients k;
  k.w1 = w * b0 * gr + xi0 * gi;
  k.w2 = w * b0 * gi - xi0 * gr;
  k.p1 = w3p * s - w2p * eta1;
  k.q1 = w3p * s + w * (k.w1 - w * eta0);
  k.r1 = w4p * (c * c - s * s) + w3p * (eta1 + eta0) * s - w2p * (xi1 + xi0) * c -
         w2p * eta1 * eta0 + xi1 * xi0;
  k.p2 = -w3p * c + w * xi1;
  k.q2 = -w3p * c + w * (k.w2 + xi0);
  k.r2 = 2.0 * w4p * s * c - w3p * (eta1 + eta0) * c - w2p * (xi1 + xi0) * s +
         w * (xi0 * eta1 + xi1 * eta0);
  return k;
}

namespace detail {

inline constexpr double kSingularDet = 1e-12;

inline std::optional<GainPoint> solve_gains(double p1, double q1, double r1, double p2, double q2,
                                            double r2) {
  const double det = p2 * q1 - p1 * q2;
  const double scale = std::max({std::abs(p2 * q1), std::abs(p1 * q2), 1e-300});
  if (!(std::abs(det) > kSingularDet * scale)) return std::nullopt;
  GainPoint g{(q2 * r1 - q1 * r2) / det, (p1 * r2 - p2 * r1) / det};
  if (!std::isfinite(g.beta_cross_tail) || !std::isfinite(g.beta_cross_head)) return std::nullopt;
  return g;
}

}  // namespace detail

/// Gain pair placing a root pair at +-j Omega; nullopt when the system is
/// singular.
inline std::optional<GainPoint> hopf_boundary(double omega, const LinearizedPacket& lin) {
  if (!(omega > 0.0)) throw Error(ErrorCode::kInvalidArgument, "Hopf frequency must be positive");
  const auto k = boundary_coefficients(omega, lin);
  return detail::solve_gains(k.p1, k.q1, k.r1, k.p2, k.q2, k.r2);
}

/// Line p x + q y + r = 0 on which P(0) vanishes.
inline ZeroFrequencyLine string_boundary_zero(const LinearizedPacket& lin) {
  const auto line = zero_frequency_line(lin);
  if (!(std::abs(line.p) > 0.0) || !std::isfinite(line.p) || !std::isfinite(line.q) ||
      !std::isfinite(line.r)) {
    throw Error(ErrorCode::kDegenerate, "zero-frequency string boundary is degenerate");
  }
  return line;
}

/// Coefficients of G(j omega) = e^{-jK} (primed p and r; q unchanged).
inline BoundaryCoefficients string_family_coefficients(double omega, double wave_number,
                                                       const LinearizedPacket& lin) {
  auto k = boundary_coefficients(omega, lin);
  const double ck = std::cos(wave_number);
  const double sk = std::sin(wave_number);
  const double xi1 = lin.head.xi;
  const double b1 = lin.beta_head;
  const double w = omega;
  const double r_a = w * b1 * k.w1 + xi1 * k.w2;
  const double r_b = w * b1 * k.w2 - xi1 * k.w1;
  const double p1 = w * w * b1 * ck + w * xi1 * sk + k.p1;
  const double p2 = w * w * b1 * sk - w * xi1 * ck + k.p2;
  const double r1 = r_a * ck - r_b * sk + k.r1;
  const double r2 = r_a * sk + r_b * ck + k.r2;
  k.p1 = p1;
  k.p2 = p2;
  k.r1 = r1;
  k.r2 = r2;
  return k;
}

/// Gain pair with G(j omega) = e^{-jK}; nullopt when singular.
inline std::optional<GainPoint> string_boundary_family(double omega, double wave_number,
                                                       const LinearizedPacket& lin) {
  if (!(omega > 0.0)) throw Error(ErrorCode::kInvalidArgument, "frequency must be positive");
  const auto k = string_family_coefficients(omega, wave_number, lin);
  return detail::solve_gains(k.p1, k.q1, k.r1, k.p2, k.q2, k.r2);
}

// ---------------------------------------------------------------------------
// Tracing

enum class BoundaryKind { kHopf, kStringZero, kStringNonzero };

inline const char* to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::kHopf: return "hopf";
    case BoundaryKind::kStringZero: return "string_zero";
    case BoundaryKind::kStringNonzero: return "string_nonzero";
  }
  return "?";
}

/// Axis-aligned box in the gain plane.
struct GainBox {
  double tail_min = -0.5, tail_max = 2.0;
  double head_min = -0.5, head_max = 2.0;

  bool contains(const GainPoint& g) const {
    return g.beta_cross_tail >= tail_min && g.beta_cross_tail <= tail_max &&
           g.beta_cross_head >= head_min && g.beta_cross_head <= head_max;
  }

  GainBox expanded(double fraction) const {
    const double dt = (tail_max - tail_min) * fraction;
    const double dh = (head_max - head_min) * fraction;
    return {tail_min - dt, tail_max + dt, head_min - dh, head_max + dh};
  }
};

/// Polyline; points outside the clip box or at singular parameters split
/// the curve into branches.
struct BoundaryCurve {
  BoundaryKind kind = BoundaryKind::kHopf;
  double wave_number = 0.0;  // string_nonzero only
  std::vector<std::vector<double>> branch_params;
  std::vector<std::vector<GainPoint>> branches;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& b : branches) n += b.size();
    return n;
  }
};

struct BoundarySweep {
  double omega_max = 5.0;
  std::size_t n_hopf = 2000;
  std::size_t n_family = 1000;
  std::size_t n_wave_numbers = 64;
};

namespace detail {

template <class Solve>
BoundaryCurve trace(BoundaryKind kind, double wave_number, double omega_max, std::size_t n,
                    const GainBox& clip, Solve&& solve) {
  BoundaryCurve curve;
  curve.kind = kind;
  curve.wave_number = wave_number;
  bool open = false;
  for (std::size_t k = 1; k <= n; ++k) {
    const double w = omega_max * static_cast<double>(k) / static_cast<double>(n);
    const auto g = solve(w);
    if (!g || !clip.contains(*g)) {
      open = false;
      continue;
    }
    if (!open) {
      curve.branches.emplace_back();
      curve.branch_params.emplace_back();
      open = true;
    }
    curve.branches.back().push_back(*g);
    curve.branch_params.back().push_back(w);
  }
  return curve;
}

}  // namespace detail

inline BoundaryCurve trace_hopf(const LinearizedPacket& lin, const GainBox& clip,
                                const BoundarySweep& sweep = {}) {
  return detail::trace(BoundaryKind::kHopf, 0.0, sweep.omega_max, sweep.n_hopf, clip,
                       [&](double w) { return hopf_boundary(w, lin); });
}

inline BoundaryCurve trace_string_family(const LinearizedPacket& lin, double wave_number,
                                         const GainBox& clip, const BoundarySweep& sweep = {}) {
  return detail::trace(BoundaryKind::kStringNonzero, wave_number, sweep.omega_max,
                       sweep.n_family, clip,
                       [&](double w) { return string_boundary_family(w, wave_number, lin); });
}

/// The zero-frequency line clipped to the box, parameterized by
/// beta_cross_head.
inline BoundaryCurve trace_string_zero(const LinearizedPacket& lin, const GainBox& clip,
                                       std::size_t n = 200) {
  const auto line = string_boundary_zero(lin);
  BoundaryCurve curve;
  curve.kind = BoundaryKind::kStringZero;
  bool open = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double y = clip.head_min + (clip.head_max - clip.head_min) * static_cast<double>(k) /
                                         static_cast<double>(n - 1);
    const GainPoint g{-(line.q * y + line.r) / line.p, y};
    if (!clip.contains(g)) {
      open = false;
      continue;
    }
    if (!open) {
      curve.branches.emplace_back();
      curve.branch_params.emplace_back();
      open = true;
    }
    curve.branches.back().push_back(g);
    curve.branch_params.back().push_back(y);
  }
  return curve;
}

inline std::vector<BoundaryCurve> trace_all_boundaries(const LinearizedPacket& lin,
                                                       const GainBox& clip,
                                                       const BoundarySweep& sweep = {}) {
  std::vector<BoundaryCurve> out;
  out.push_back(trace_hopf(lin, clip, sweep));
  try {
    out.push_back(trace_string_zero(lin, clip));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
  }
  for (std::size_t k = 0; k < sweep.n_wave_numbers; ++k) {
    const double wave = 2.0 * std::numbers::pi * static_cast<double>(k) /
                        static_cast<double>(sweep.n_wave_numbers);
    out.push_back(trace_string_family(lin, wave, clip, sweep));
  }
  return out;
}

}  // namespace ccpair

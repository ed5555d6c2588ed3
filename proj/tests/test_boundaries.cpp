#include <gtest/gtest.h>

#include <cmath>

#include "ccpair/boundaries.hpp"

using namespace ccpair;

namespace {

LinearizedPacket table_packet(std::size_t n = 4) {
  PacketFingerprint fp;
  fp.n_hv = n;
  return linearize(fp);
}

// D(s) written out directly; relative to the size of its summands.
double relative_residual(const LinearizedPacket& base, const GainPoint& g, double omega) {
  const auto lin = with_cross_gains(base, g.beta_cross_tail, g.beta_cross_head);
  const cplx s{0.0, omega};
  const cplx d0 = s * s * std::exp(s * lin.sigma) + (lin.tail.eta + g.beta_cross_tail) * s +
                  lin.tail.xi;
  const cplx d1 = s * s * std::exp(s * lin.sigma) + (lin.head.eta + g.beta_cross_head) * s +
                  lin.head.xi;
  cplx hv{1.0};
  for (std::size_t i = 0; i < lin.n_hv; ++i) {
    hv *= (lin.beta_hv * s + lin.hv.xi) /
          (s * s * std::exp(s * lin.tau) + lin.hv.eta * s + lin.hv.xi);
  }
  const cplx fwd = (lin.beta_tail * s + lin.tail.xi) * hv + g.beta_cross_tail * s;
  const cplx cross = fwd * g.beta_cross_head * s;
  return std::abs(d0 * d1 - cross) / (std::abs(d0 * d1) + std::abs(cross));
}

}  // namespace

TEST(Hopf, PointsSolveTheCharacteristicEquation) {
  for (std::size_t n : {0u, 4u, 7u}) {
    const auto lin = table_packet(n);
    const GainBox clip = GainBox{}.expanded(0.5);
    const auto curve = trace_hopf(lin, clip);
    ASSERT_GT(curve.point_count(), 0u) << "N=" << n;
    for (std::size_t b = 0; b < curve.branches.size(); ++b) {
      for (std::size_t k = 0; k < curve.branches[b].size(); ++k) {
        const auto& g = curve.branches[b][k];
        EXPECT_TRUE(clip.contains(g));
        EXPECT_LT(relative_residual(lin, g, curve.branch_params[b][k]), 1e-9);
      }
    }
  }
}

TEST(Hopf, MatchesLibraryCharacteristicFunction) {
  const auto lin = table_packet();
  for (double w : {0.3, 0.7, 1.1, 1.9}) {
    const auto g = hopf_boundary(w, lin);
    ASSERT_TRUE(g);
    const auto at = with_cross_gains(lin, g->beta_cross_tail, g->beta_cross_head);
    const cplx d = characteristic_function({0.0, w}, at);
    EXPECT_LT(std::abs(d), 1e-9 * (1.0 + std::abs(g->beta_cross_tail) + std::abs(g->beta_cross_head)));
  }
  EXPECT_THROW(hopf_boundary(0.0, lin), Error);
}

TEST(StringFamily, UnitGainWithRequestedPhase) {
  const auto lin = table_packet(5);
  const GainBox clip = GainBox{}.expanded(0.5);
  for (double wave : {0.3, 1.0, 2.0, 3.0, 4.5, 6.0}) {
    const auto curve = trace_string_family(lin, wave, clip);
    for (std::size_t b = 0; b < curve.branches.size(); ++b) {
      for (std::size_t k = 0; k < curve.branches[b].size(); ++k) {
        const auto& g = curve.branches[b][k];
        const double w = curve.branch_params[b][k];
        const auto at = with_cross_gains(lin, g.beta_cross_tail, g.beta_cross_head);
        const cplx gw = head_to_tail_tf({0.0, w}, at);
        EXPECT_LT(std::abs(gw - std::polar(1.0, -wave)), 1e-8) << "K=" << wave << " w=" << w;
      }
    }
  }
}

TEST(StringZero, LineIsWhereLowFrequencyGainIsOne) {
  const auto lin = table_packet();
  const auto curve = trace_string_zero(lin, GainBox{});
  ASSERT_EQ(curve.branches.size(), 1u);
  for (const auto& g : curve.branches[0]) {
    const auto at = with_cross_gains(lin, g.beta_cross_tail, g.beta_cross_head);
    EXPECT_NEAR(p_of_omega(at, 0.0), 0.0, 1e-12);
    // Just off the line |G| crosses 1 at small omega.
    const auto left = with_cross_gains(lin, g.beta_cross_tail - 0.05, g.beta_cross_head);
    const auto right = with_cross_gains(lin, g.beta_cross_tail + 0.05, g.beta_cross_head);
    EXPECT_LT(p_of_omega(left, 1e-3) * p_of_omega(right, 1e-3), 0.0);
  }
}

TEST(StringZero, SlopeFromGainRatio) {
  const auto lin = table_packet(6);
  const auto line = string_boundary_zero(lin);
  EXPECT_NEAR(line.q / line.p, -lin.tail.xi / lin.head.xi, 1e-14);
  // Same slope from finite differences of P(0).
  const double h = 1e-3;
  auto p0 = [&](double x, double y) { return p_of_omega(with_cross_gains(lin, x, y), 0.0); };
  const double dpx = (p0(0.5 + h, 0.5) - p0(0.5 - h, 0.5)) / (2 * h);
  const double dpy = (p0(0.5, 0.5 + h) - p0(0.5, 0.5 - h)) / (2 * h);
  EXPECT_NEAR(dpx, line.p, 1e-9);
  EXPECT_NEAR(dpy, line.q, 1e-9);
}

TEST(StringZero, DegenerateWithoutTailRangeTerm) {
  PacketFingerprint fp;
  fp.alpha_tail = 0.0;
  try {
    string_boundary_zero(linearize(fp));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
  // Tracing skips the degenerate line instead of failing.
  const auto all = trace_all_boundaries(linearize(fp), GainBox{}, {5.0, 50, 50, 4});
  for (const auto& c : all) EXPECT_NE(c.kind, BoundaryKind::kStringZero);
}

TEST(Coefficients, NoHumansReduceToDirectFormula) {
  const auto lin = table_packet(0);
  const double w = 0.9;
  const auto k = boundary_coefficients(w, lin);
  EXPECT_NEAR(k.w1, w * lin.beta_tail, 1e-15);
  EXPECT_NEAR(k.w2, -lin.tail.xi, 1e-15);
}

TEST(Tracing, AllCurvesPresent) {
  const auto all = trace_all_boundaries(table_packet(), GainBox{}.expanded(0.5), {5.0, 200, 100, 8});
  ASSERT_EQ(all.size(), 10u);
  EXPECT_EQ(all[0].kind, BoundaryKind::kHopf);
  EXPECT_EQ(all[1].kind, BoundaryKind::kStringZero);
  for (std::size_t k = 2; k < all.size(); ++k) {
    EXPECT_EQ(all[k].kind, BoundaryKind::kStringNonzero);
    EXPECT_NEAR(all[k].wave_number, 2.0 * std::numbers::pi * (k - 2) / 8.0, 1e-15);
  }
  for (const auto& c : all) {
    ASSERT_EQ(c.branches.size(), c.branch_params.size());
    for (std::size_t b = 0; b < c.branches.size(); ++b) {
      EXPECT_EQ(c.branches[b].size(), c.branch_params[b].size());
      EXPECT_FALSE(c.branches[b].empty());
    }
  }
  EXPECT_STREQ(to_string(BoundaryKind::kStringNonzero), "string_nonzero");
}

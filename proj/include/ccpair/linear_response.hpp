#pragma once

#include <span>
#include <vector>

#include "ccpair/delay_chain.hpp"
#include "ccpair/lead_profile.hpp"
#include "ccpair/linear.hpp"

namespace ccpair {

namespace detail {

/// Linearized packet dynamics in deviation coordinates.
class LinearChain {
 public:
  LinearChain(const LinearizedPacket& lin, const LeadProfile& lead, double v_star)
      : lin_(lin), lead_(lead), v_star_(v_star) {}

  std::size_t size() const { return lin_.n_hv + 2; }

  double delay(std::size_t i) const { return is_hv(i) ? lin_.tau : lin_.sigma; }

  double lead_speed(double t) const { return lead_(t) - v_star_; }

  double command(std::size_t i, std::span<const double> h, std::span<const double> v,
                 double v_lead) const {
    const double pred = i + 1 < v.size() ? v[i + 1] : v_lead;
    if (i == 0) {
      return lin_.tail.xi * h[i] - (lin_.tail.eta + lin_.beta_cross_tail) * v[i] +
             lin_.beta_tail * pred + lin_.beta_cross_tail * v[head()];
    }
    if (i == head()) {
      return lin_.head.xi * h[i] - (lin_.head.eta + lin_.beta_cross_head) * v[i] +
             lin_.beta_head * pred + lin_.beta_cross_head * v[0];
    }
    return lin_.hv.xi * h[i] - lin_.hv.eta * v[i] + lin_.beta_hv * pred;
  }

  double accel(std::size_t, double u_delayed, double) const { return u_delayed; }

 private:
  bool is_hv(std::size_t i) const { return i != 0 && i != head(); }
  std::size_t head() const { return lin_.n_hv + 1; }

  LinearizedPacket lin_;
  LeadEvaluator lead_;
  double v_star_;
};

}  // namespace detail

/// Time response of the linearized packet to the lead motion `lead`, in
/// deviations from the equilibrium at v_star (v_lead deviation included).
inline ChainRecord simulate_linear_packet(const LinearizedPacket& lin, const LeadProfile& lead,
                                          double v_star, const IntegrationSettings& settings) {
  const detail::LinearChain chain(lin, lead, v_star);
  const std::vector<double> zeros(chain.size(), 0.0);
  return integrate_chain(chain, zeros, zeros, settings);
}

}  // namespace ccpair

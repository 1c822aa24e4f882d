// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>

#include "refundlab/distribution.hpp"
#include "refundlab/market.hpp"
#include "refundlab/policy.hpp"
#include "refundlab/rng.hpp"

namespace refundlab {

enum class NamedPolicy {
  kRobustRandomPricing,
  kGenerousRefund,
  kRandomDiscounting,
  kRobustRefundPolicy,
};

/// Textbook profit formulas for the four named policies, driven entirely by
/// areas under the CDF.  Assumes F has mean mu.  Throws std::domain_error
/// when random discounting is requested with gamma <= gamma_bar.
double profit_closed_form(NamedPolicy kind, const SignalDistribution& dist,
                          const MarketParams& params);

/// Exact E_F of a piecewise-affine profile: atoms pick up the tie-resolved
/// knot value when they sit exactly on a knot, density pieces integrate in
/// closed form.
double expectation(const PerSignalProfile& profile,
                   const SignalDistribution& dist);

/// E_F of the seller-profit profile of an arbitrary policy.
double profit_generic(const PricingPolicy& policy,
                      const SignalDistribution& dist,
                      const MarketParams& params,
                      TieRule tie = TieRule::kAdversarial);

/// E_F of the buyer-payoff profile.
double buyer_payoff(const PricingPolicy& policy, const SignalDistribution& dist,
                    const MarketParams& params,
                    TieRule tie = TieRule::kAdversarial);

struct MonteCarloResult {
  double estimate;
  double std_error;
};

/// Simulates n rounds of (offer draw, signal draw, purchase, value draw,
/// return) and averages the seller's realized profit.
MonteCarloResult monte_carlo(const PricingPolicy& policy,
                             const SignalDistribution& dist,
                             const MarketParams& params, TieRule tie,
                             std::size_t n, Rng& rng);

}  // namespace refundlab

// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <vector>

#include "refundlab/distribution.hpp"
#include "refundlab/market.hpp"
#include "refundlab/rng.hpp"

namespace refundlab {

/// Reduced direct mechanism: the monotone no-return allocation alpha0 on a
/// signal grid.  The refund allocation is implied (0 below gamma, 1-alpha0
/// at and above), and transfers are pinned down by the envelope payoff
/// U(q) = int_0^q alpha0, so neither is stored.
struct MechanismAllocation {
  std::vector<double> grid;    // ascending signals
  std::vector<double> alpha0;  // nondecreasing values in [0, 1]
};

/// Per-report seller profit v(q_i): q alpha0 - int_0^q alpha0, plus the
/// refund-channel term (q - gamma)/(1 - gamma) (1 - alpha0) for q >= gamma.
/// The running integral is the right-continuous step sum over the grid with
/// alpha0 = 0 below the first grid point.
double per_signal_mechanism_profit(const MechanismAllocation& alloc,
                                   std::size_t q_index, double gamma);

/// E_F of the per-report profit for a discrete F living on alloc.grid.
/// Throws std::invalid_argument on a grid mismatch.
double mechanism_value(const MechanismAllocation& alloc,
                       const SignalDistribution& dist, double gamma);

/// E_F of the buyer's envelope payoff int_0^q alpha0.
double mechanism_buyer_payoff(const MechanismAllocation& alloc,
                              const SignalDistribution& dist);

struct OptimalMechanism {
  MechanismAllocation alloc;
  double value;
  double buyer_payoff;
};

/// Maximizes E_F[v] over monotone alpha0.  The objective is linear in
/// alpha0 and the monotone cube's vertices are threshold indicators, so an
/// exact scan over thresholds t in grid and t = +inf suffices.  Ties in
/// value (1e-12) break toward the buyer-preferred allocation.
OptimalMechanism optimal_mechanism(const SignalDistribution& discrete_dist,
                                   const MarketParams& params);

/// Same, for a general F: discretizes onto `grid_n` points first.
OptimalMechanism optimal_mechanism_discretized(const SignalDistribution& dist,
                                               const MarketParams& params,
                                               std::size_t grid_n = 2001);

struct IndeterminacyReport {
  double v_star;
  double min_value;
  double max_value;
  double spread;  // max - min over the allocation battery
  std::size_t battery_size;
};

/// Evaluates E_{F_w}[v] for a battery of feasible allocations (all-zero,
/// all-one, thresholds at gamma and v*, and random monotone profiles); in
/// the continuum every one of them earns exactly v*.
IndeterminacyReport verify_indeterminacy(const MarketParams& params,
                                         std::size_t grid_n, Rng& rng);

struct MechanismOutcome {
  double seller_value;
  double buyer_payoff;
};

struct BuyerOptimalReport {
  double mu;
  double v_star;
  std::vector<MechanismOutcome> outcomes;  // aligned with the battery
  MechanismOutcome at_worst_case;          // optimal mechanism against F_w
  double posted_price_profit;   // profit of (v*, 0) against F_w
  double posted_price_payoff;   // buyer payoff of (v*, 0) against F_w
};

/// Certification of the buyer-side equilibrium: against every battery
/// distribution the seller's optimum is at least v*, the buyer's payoff is
/// at most mu - v*, and both bounds bind at the least favorable
/// distribution under the posted price (v*, 0).
BuyerOptimalReport buyer_optimal_check(
    const MarketParams& params,
    const std::vector<SignalDistribution>& battery, std::size_t grid_n = 2001);

}  // namespace refundlab

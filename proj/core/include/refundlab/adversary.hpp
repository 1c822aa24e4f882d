// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>

#include "refundlab/distribution.hpp"
#include "refundlab/policy.hpp"

namespace refundlab {

/// Outcome of Nature's problem min_{F mean mu} E_F[g] for a per-signal
/// profit profile g: the lower-convex-envelope value at mu and a mean-mu
/// witness supported on the chord endpoints.
struct EnvelopeResult {
  double value;
  SignalDistribution witness;  // one or two atoms, mean mu
  double chord_lower;          // left endpoint of the supporting chord
  double chord_upper;          // right endpoint (== lower when on the graph)
};

/// Lower convex envelope of the profile, evaluated at mu, over a uniform
/// grid of `grid_n` points with the profile's breakpoints inserted exactly.
/// At a jump the adversary sits on the cheaper one-sided value.
EnvelopeResult worst_case(const PerSignalProfile& profile, double mu,
                          std::size_t grid_n = 10001);

/// Independent check: exact minimum over all mean-mu two-atom mixtures of
/// grid points (pairwise brute force on the same grid as worst_case).
double worst_case_oracle(const PerSignalProfile& profile, double mu,
                         std::size_t grid_n = 10001);

struct RobustPriceResult {
  double price;           // 1 - sqrt(1 - mu)
  double guarantee;       // (1 - sqrt(1 - mu))^2
  double grid_price;      // argmax of p (mu - p)/(1 - p) over the price grid
  double grid_guarantee;  // its value
};

/// Best deterministic non-refundable price and its guaranteed profit, with
/// a grid argmax retained for verification.
RobustPriceResult robust_price(double mu, double grid_step = 1e-4);

}  // namespace refundlab

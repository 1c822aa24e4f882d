// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include "refundlab/market.hpp"

namespace refundlab {

/// How an indifferent buyer at the marginal signal acts.  Adversarial (the
/// default everywhere a guarantee is computed) picks the action that hurts
/// the seller; favorable picks the one that helps him.  The generous refund
/// is exempt: its buyer buys iff q >= gamma under either rule, and the tie
/// profit is zero anyway.
enum class TieRule { kAdversarial, kFavorable };

/// A price-refund pair with 0 <= r <= p <= 1.  (1, 1) is the generous
/// refund: the limit offer whose marginal signal is gamma by convention.
struct Offer {
  double price;
  double refund;

  Offer(double p, double r);
  bool generous() const { return price == 1.0 && refund == 1.0; }

  static Offer generous_refund_offer() { return Offer(1.0, 1.0); }
  static Offer non_refundable(double p) { return Offer(p, 0.0); }
};

/// Non-refundable prices log-uniform on [lower, upper].
struct LogUniformSegment {
  double lower;
  double upper;

  LogUniformSegment(double a, double b);
};

using PolicyElement = std::variant<Offer, LogUniformSegment>;

struct PolicyComponent {
  double weight;  // in (0, 1]
  PolicyElement element;
};

/// A finite mixture of offers and log-uniform price segments; weights sum
/// to one within 1e-12.
class PricingPolicy {
 public:
  explicit PricingPolicy(std::vector<PolicyComponent> components);

  const std::vector<PolicyComponent>& components() const {
    return components_;
  }

 private:
  std::vector<PolicyComponent> components_;
};

/// Signal below which the buyer walks away: (p - r)/(1 - r), or gamma for
/// the generous offer.
double marginal_signal(const Offer& offer, double gamma);

/// Refund that puts the marginal signal exactly at gamma: (p - gamma)/(1 -
/// gamma), for gamma <= p <= 1 and gamma < 1.
double refund_for_price(double p, double gamma);

/// Expected seller profit from one offer at realized signal q: zero without
/// a purchase, p for a kept non-refundable sale, p - (1 - q)(c + r) with a
/// live return option.
double per_signal_profit(const Offer& offer, double q,
                         const MarketParams& params, TieRule tie);

/// Expected buyer payoff from one offer at signal q.
double per_signal_buyer_payoff(const Offer& offer, double q,
                               const MarketParams& params, TieRule tie);

/// Piecewise-affine function of the signal with explicit one-sided values
/// at its breakpoints.  Pieces live on the open intervals between knots;
/// the value exactly at a knot is stored separately so an atom placed on a
/// jump picks up the tie-resolved value.
class PerSignalProfile {
 public:
  struct Piece {
    double slope;
    double intercept;
  };

  PerSignalProfile(std::vector<double> knots, std::vector<Piece> pieces,
                   std::vector<double> knot_values);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<double>& knot_values() const { return knot_values_; }

  double value(double q) const;
  double left_limit(std::size_t knot_index) const;
  double right_limit(std::size_t knot_index) const;

 private:
  std::vector<double> knots_;        // ascending, first = 0, last = 1
  std::vector<Piece> pieces_;        // pieces_[i] on (knots_[i], knots_[i+1])
  std::vector<double> knot_values_;  // value exactly at knots_[i]
};

/// Expected seller profit as a function of the signal, mixing over the
/// policy's components.
PerSignalProfile profile(const PricingPolicy& policy,
                         const MarketParams& params, TieRule tie);

/// Expected buyer payoff as a function of the signal.  Log-uniform segments
/// contribute a q log q term, which is chorded onto `segment_resolution`
/// geometric sub-intervals.
PerSignalProfile buyer_profile(const PricingPolicy& policy,
                               const MarketParams& params, TieRule tie,
                               std::size_t segment_resolution = 512);

/// Non-refundable prices log-uniform on [v*, gamma]; requires
/// gamma > gamma_bar(mu).  Throws std::domain_error otherwise.
PricingPolicy random_discounting(const MarketParams& params);

/// Non-refundable prices log-uniform on [V_1*, 1].
PricingPolicy robust_random_pricing(double mu);

/// The pure (1, 1) offer.
PricingPolicy generous_refund();

/// beta* on the generous refund, 1 - beta* on random discounting; collapses
/// to the pure generous refund for gamma <= gamma_bar and to robust random
/// pricing at gamma = 1.
PricingPolicy robust_refund_policy(const MarketParams& params);

/// JSON round trip: {"components": [{"weight", "kind": "offer"|"loguniform",
/// "p", "r" | "a", "b"}]}.
void write_policy_json(std::ostream& os, const PricingPolicy& policy);
PricingPolicy read_policy_json(std::istream& is);

}  // namespace refundlab

// SPDX-License-Identifier: MIT
#include "refundlab/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace refundlab {

double profit_closed_form(NamedPolicy kind, const SignalDistribution& dist,
                          const MarketParams& params) {
  const double mu = params.mu;
  const double gamma = params.gamma;
  switch (kind) {
    case NamedPolicy::kRobustRandomPricing: {
      const double v1 = best_guaranteed_profit(MarketParams(mu, 1.0)).v_star;
      return v1 + dist.integral_cdf(0.0, v1) / (-std::log(v1));
    }
    case NamedPolicy::kGenerousRefund: {
      if (gamma >= 1.0)
        throw std::domain_error(
            "profit_closed_form: generous refund undefined at gamma = 1");
      return 1.0 - dist.integral_cdf(gamma, 1.0) / (1.0 - gamma);
    }
    case NamedPolicy::kRandomDiscounting: {
      const RobustSolution sol = best_guaranteed_profit(params);
      if (sol.branch == CostBranch::kLow)
        throw std::domain_error(
            "profit_closed_form: random discounting needs gamma > gamma_bar");
      const double v = sol.v_star;
      return (gamma - v - dist.integral_cdf(v, gamma)) /
             std::log(gamma / v);
    }
    case NamedPolicy::kRobustRefundPolicy: {
      const RobustSolution sol = best_guaranteed_profit(params);
      const double v = sol.v_star;
      if (sol.branch == CostBranch::kLow)
        return v + dist.integral_cdf(0.0, gamma) / (1.0 - gamma);
      const double denom = 1.0 - gamma + std::log(gamma / v);
      return v + dist.integral_cdf(0.0, v) / denom;
    }
  }
  throw std::logic_error("profit_closed_form: unreachable");
}

double expectation(const PerSignalProfile& profile,
                   const SignalDistribution& dist) {
  const auto& knots = profile.knots();
  const auto& pieces = profile.pieces();
  double acc = 0.0;
  for (const auto& seg : dist.segments()) {
    if (const auto* atom = std::get_if<Atom>(&seg)) {
      acc += atom->mass * profile.value(atom->location);
      continue;
    }
    const auto& p = std::get<ParetoDensity>(seg);
    // int (s q + t) k / q^2 dq = k [ s log q - t / q ] per overlap.
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double x1 = std::max(knots[i], p.lower);
      const double x2 = std::min(knots[i + 1], p.upper);
      if (x2 <= x1) continue;
      acc += p.scale * (pieces[i].slope * std::log(x2 / x1) +
                        pieces[i].intercept * (1.0 / x1 - 1.0 / x2));
    }
  }
  return acc;
}

double profit_generic(const PricingPolicy& policy,
                      const SignalDistribution& dist,
                      const MarketParams& params, TieRule tie) {
  return expectation(profile(policy, params, tie), dist);
}

double buyer_payoff(const PricingPolicy& policy, const SignalDistribution& dist,
                    const MarketParams& params, TieRule tie) {
  return expectation(buyer_profile(policy, params, tie), dist);
}

namespace {

bool buys(const Offer& offer, double q, const MarketParams& params,
          TieRule tie) {
  if (offer.generous()) return q >= params.gamma;
  const double qbar = marginal_signal(offer, params.gamma);
  if (q > qbar) return true;
  if (q < qbar) return false;
  // Indifferent buyer: break the tie against (or for) the seller.
  const double h = offer.refund == 0.0
                       ? offer.price
                       : offer.price - (1.0 - q) * (params.raw_cost() +
                                                    offer.refund);
  return tie == TieRule::kAdversarial ? h < 0.0 : h > 0.0;
}

}  // namespace

MonteCarloResult monte_carlo(const PricingPolicy& policy,
                             const SignalDistribution& dist,
                             const MarketParams& params, TieRule tie,
                             std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("monte_carlo: n < 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Offer draw.
    const double u = rng.uniform();
    double cum = 0.0;
    const PolicyComponent* chosen = &policy.components().back();
    for (const auto& comp : policy.components()) {
      cum += comp.weight;
      if (u < cum) {
        chosen = &comp;
        break;
      }
    }
    Offer offer = Offer::non_refundable(1.0);
    if (const auto* seg = std::get_if<LogUniformSegment>(&chosen->element)) {
      const double t = rng.uniform();
      offer = Offer::non_refundable(
          seg->lower * std::pow(seg->upper / seg->lower, t));
    } else {
      offer = std::get<Offer>(chosen->element);
    }

    const double q = dist.sample_one(rng);
    double profit = 0.0;
    if (buys(offer, q, params, tie)) {
      const bool fits = rng.uniform() < q;
      if (!fits && offer.refund > 0.0)
        profit = offer.price - offer.refund - params.raw_cost();
      else
        profit = offer.price;
    }
    sum += profit;
    sum_sq += profit * profit;
  }
  const double mean = sum / static_cast<double>(n);
  const double var =
      n > 1 ? std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(n - 1))
            : 0.0;
  return MonteCarloResult{mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace refundlab

// SPDX-License-Identifier: MIT
#include "refundlab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace refundlab {

Offer::Offer(double p, double r) : price(p), refund(r) {
  if (!(r >= 0.0 && r <= p && p <= 1.0))
    throw std::invalid_argument("Offer: need 0 <= r <= p <= 1");
}

LogUniformSegment::LogUniformSegment(double a, double b) : lower(a), upper(b) {
  if (!(0.0 < a && a < b && b <= 1.0))
    throw std::invalid_argument("LogUniformSegment: need 0 < a < b <= 1");
}

PricingPolicy::PricingPolicy(std::vector<PolicyComponent> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("PricingPolicy: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0 && c.weight <= 1.0))
      throw std::invalid_argument("PricingPolicy: weight outside (0, 1]");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("PricingPolicy: weights must sum to 1");
}

double marginal_signal(const Offer& offer, double gamma) {
  if (offer.generous()) return gamma;
  return (offer.price - offer.refund) / (1.0 - offer.refund);
}

double refund_for_price(double p, double gamma) {
  if (!(gamma < 1.0))
    throw std::domain_error("refund_for_price: gamma must be < 1");
  if (!(gamma <= p && p <= 1.0))
    throw std::domain_error("refund_for_price: need gamma <= p <= 1");
  return (p - gamma) / (1.0 - gamma);
}

double per_signal_profit(const Offer& offer, double q,
                         const MarketParams& params, TieRule tie) {
  const double gamma = params.gamma;
  if (offer.generous()) {
    // Definition of the (1,1) limit offer: buy iff q >= gamma.
    if (gamma >= 1.0) return q >= 1.0 ? 1.0 : 0.0;
    return q >= gamma ? (q - gamma) / (1.0 - gamma) : 0.0;
  }
  if (offer.refund > 0.0 && gamma >= 1.0)
    throw std::domain_error(
        "per_signal_profit: refundable offer with infinite restocking cost");
  const double qbar = marginal_signal(offer, gamma);
  const double h = offer.refund == 0.0
                       ? offer.price
                       : offer.price - (1.0 - q) * (params.raw_cost() +
                                                    offer.refund);
  if (q > qbar) return h;
  if (q < qbar) return 0.0;
  return tie == TieRule::kAdversarial ? std::min(0.0, h) : std::max(0.0, h);
}

double per_signal_buyer_payoff(const Offer& offer, double q,
                               const MarketParams& params, TieRule /*tie*/) {
  if (offer.generous()) return 0.0;  // pays 1, keeps 1 or refunds 1
  const double qbar = marginal_signal(offer, params.gamma);
  if (q <= qbar) return 0.0;  // payoff at the marginal signal is zero
  if (offer.refund == 0.0) return q - offer.price;
  return q * (1.0 - offer.price) +
         (1.0 - q) * (offer.refund - offer.price);
}

PerSignalProfile::PerSignalProfile(std::vector<double> knots,
                                   std::vector<Piece> pieces,
                                   std::vector<double> knot_values)
    : knots_(std::move(knots)),
      pieces_(std::move(pieces)),
      knot_values_(std::move(knot_values)) {
  if (knots_.size() < 2 || pieces_.size() + 1 != knots_.size() ||
      knot_values_.size() != knots_.size())
    throw std::invalid_argument("PerSignalProfile: inconsistent sizes");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw std::invalid_argument("PerSignalProfile: knots must ascend");
}

double PerSignalProfile::value(double q) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), q);
  if (it != knots_.end() && *it == q)
    return knot_values_[static_cast<std::size_t>(it - knots_.begin())];
  if (it == knots_.begin() || it == knots_.end())
    throw std::invalid_argument("PerSignalProfile::value: q outside [0, 1]");
  const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return pieces_[i].slope * q + pieces_[i].intercept;
}

double PerSignalProfile::left_limit(std::size_t i) const {
  if (i == 0) return knot_values_.front();
  return pieces_[i - 1].slope * knots_[i] + pieces_[i - 1].intercept;
}

double PerSignalProfile::right_limit(std::size_t i) const {
  if (i + 1 == knots_.size()) return knot_values_.back();
  return pieces_[i].slope * knots_[i] + pieces_[i].intercept;
}

namespace {

// A component's contribution to a profile: interior breakpoints, affine
// coefficients away from them, and the exact (tie-resolved) value anywhere.
struct Contribution {
  std::vector<double> breaks;
  std::function<PerSignalProfile::Piece(double)> piece_at;
  std::function<double(double)> value_at;
};

Contribution seller_contribution(const PolicyComponent& comp,
                                 const MarketParams& params, TieRule tie) {
  const double w = comp.weight;
  if (const auto* seg = std::get_if<LogUniformSegment>(&comp.element)) {
    const double a = seg->lower, b = seg->upper;
    const double inv_log = 1.0 / std::log(b / a);
    Contribution c;
    if (a < 1.0) c.breaks.push_back(a);
    if (b < 1.0) c.breaks.push_back(b);
    c.piece_at = [=](double q) -> PerSignalProfile::Piece {
      if (q < a) return {0.0, 0.0};
      if (q < b) return {w * inv_log, -w * a * inv_log};
      return {0.0, w * (b - a) * inv_log};
    };
    c.value_at = [=](double q) {
      return q <= a ? 0.0 : w * (std::min(q, b) - a) * inv_log;
    };
    return c;
  }

  const Offer offer = std::get<Offer>(comp.element);
  Contribution c;
  c.value_at = [=](double q) {
    return w * per_signal_profit(offer, q, params, tie);
  };
  if (offer.generous()) {
    const double g = params.gamma;
    if (g < 1.0) {
      if (g > 0.0) c.breaks.push_back(g);
      c.piece_at = [=](double q) -> PerSignalProfile::Piece {
        if (q < g) return {0.0, 0.0};
        return {w / (1.0 - g), -w * g / (1.0 - g)};
      };
    } else {
      c.piece_at = [](double) -> PerSignalProfile::Piece { return {0, 0}; };
    }
    return c;
  }
  const double qbar = marginal_signal(offer, params.gamma);
  if (qbar > 0.0 && qbar < 1.0) c.breaks.push_back(qbar);
  if (offer.refund == 0.0) {
    c.piece_at = [=](double q) -> PerSignalProfile::Piece {
      return q < qbar ? PerSignalProfile::Piece{0.0, 0.0}
                      : PerSignalProfile::Piece{0.0, w * offer.price};
    };
  } else {
    const double cr = params.raw_cost() + offer.refund;
    c.piece_at = [=](double q) -> PerSignalProfile::Piece {
      return q < qbar
                 ? PerSignalProfile::Piece{0.0, 0.0}
                 : PerSignalProfile::Piece{w * cr, w * (offer.price - cr)};
    };
  }
  return c;
}

Contribution buyer_contribution(const PolicyComponent& comp,
                                const MarketParams& params, TieRule tie,
                                std::size_t resolution) {
  const double w = comp.weight;
  if (const auto* seg = std::get_if<LogUniformSegment>(&comp.element)) {
    const double a = seg->lower, b = seg->upper;
    const double inv_log = 1.0 / std::log(b / a);
    // Exact payoff; affine below a and above b, q log q shaped in between.
    auto exact = [=](double q) {
      if (q <= a) return 0.0;
      const double top = std::min(q, b);
      return w * (q * std::log(top / a) - (top - a)) * inv_log;
    };
    Contribution c;
    std::vector<double> grid(resolution + 1);
    const double ratio = std::pow(b / a, 1.0 / resolution);
    for (std::size_t j = 0; j <= resolution; ++j)
      grid[j] = (j == resolution) ? b : a * std::pow(ratio, double(j));
    for (double g : grid)
      if (g > 0.0 && g < 1.0) c.breaks.push_back(g);
    c.piece_at = [=](double q) -> PerSignalProfile::Piece {
      if (q < a) return {0.0, 0.0};
      if (q > b) return {w, w * (-(b - a) * inv_log)};
      auto it = std::upper_bound(grid.begin(), grid.end(), q);
      const auto j = static_cast<std::size_t>(it - grid.begin());
      const double x0 = grid[j - 1], x1 = grid[j];
      const double y0 = exact(x0), y1 = exact(x1);
      const double slope = (y1 - y0) / (x1 - x0);
      return {slope, y0 - slope * x0};
    };
    c.value_at = exact;
    return c;
  }

  const Offer offer = std::get<Offer>(comp.element);
  Contribution c;
  c.value_at = [=](double q) {
    return w * per_signal_buyer_payoff(offer, q, params, tie);
  };
  if (offer.generous()) {
    c.piece_at = [](double) -> PerSignalProfile::Piece { return {0, 0}; };
    return c;
  }
  const double qbar = marginal_signal(offer, params.gamma);
  if (qbar > 0.0 && qbar < 1.0) c.breaks.push_back(qbar);
  const double slope = offer.refund == 0.0 ? 1.0 : 1.0 - offer.refund;
  const double icept = offer.refund == 0.0
                           ? -offer.price
                           : offer.refund - offer.price;
  c.piece_at = [=](double q) -> PerSignalProfile::Piece {
    return q < qbar ? PerSignalProfile::Piece{0.0, 0.0}
                    : PerSignalProfile::Piece{w * slope, w * icept};
  };
  return c;
}

PerSignalProfile assemble(const std::vector<Contribution>& contributions) {
  std::vector<double> knots{0.0, 1.0};
  for (const auto& c : contributions)
    knots.insert(knots.end(), c.breaks.begin(), c.breaks.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::vector<PerSignalProfile::Piece> pieces(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double mid = 0.5 * (knots[i] + knots[i + 1]);
    double slope = 0.0, icept = 0.0;
    for (const auto& c : contributions) {
      const auto p = c.piece_at(mid);
      slope += p.slope;
      icept += p.intercept;
    }
    pieces[i] = {slope, icept};
  }
  std::vector<double> values(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    double v = 0.0;
    for (const auto& c : contributions) v += c.value_at(knots[i]);
    values[i] = v;
  }
  return PerSignalProfile(std::move(knots), std::move(pieces),
                          std::move(values));
}

}  // namespace

PerSignalProfile profile(const PricingPolicy& policy,
                         const MarketParams& params, TieRule tie) {
  std::vector<Contribution> parts;
  parts.reserve(policy.components().size());
  for (const auto& comp : policy.components())
    parts.push_back(seller_contribution(comp, params, tie));
  return assemble(parts);
}

PerSignalProfile buyer_profile(const PricingPolicy& policy,
                               const MarketParams& params, TieRule tie,
                               std::size_t segment_resolution) {
  std::vector<Contribution> parts;
  parts.reserve(policy.components().size());
  for (const auto& comp : policy.components())
    parts.push_back(buyer_contribution(comp, params, tie, segment_resolution));
  return assemble(parts);
}

PricingPolicy random_discounting(const MarketParams& params) {
  const RobustSolution sol = best_guaranteed_profit(params);
  if (sol.branch == CostBranch::kLow)
    throw std::domain_error(
        "random_discounting: empty price interval (gamma <= gamma_bar)");
  return PricingPolicy(
      {{1.0, LogUniformSegment(sol.v_star, params.gamma)}});
}

PricingPolicy robust_random_pricing(double mu) {
  const double v1 = best_guaranteed_profit(MarketParams(mu, 1.0)).v_star;
  return PricingPolicy({{1.0, LogUniformSegment(v1, 1.0)}});
}

PricingPolicy generous_refund() {
  return PricingPolicy({{1.0, Offer::generous_refund_offer()}});
}

PricingPolicy robust_refund_policy(const MarketParams& params) {
  const RobustSolution sol = best_guaranteed_profit(params);
  if (sol.branch == CostBranch::kLow) return generous_refund();
  if (sol.beta_star <= 0.0)  // gamma = 1: no refund channel left
    return PricingPolicy(
        {{1.0, LogUniformSegment(sol.v_star, params.gamma)}});
  return PricingPolicy(
      {{sol.beta_star, Offer::generous_refund_offer()},
       {1.0 - sol.beta_star, LogUniformSegment(sol.v_star, params.gamma)}});
}

void write_policy_json(std::ostream& os, const PricingPolicy& policy) {
  nlohmann::json doc;
  doc["components"] = nlohmann::json::array();
  for (const auto& comp : policy.components()) {
    nlohmann::json item;
    item["weight"] = comp.weight;
    if (const auto* offer = std::get_if<Offer>(&comp.element)) {
      item["kind"] = "offer";
      item["p"] = offer->price;
      item["r"] = offer->refund;
    } else {
      const auto& seg = std::get<LogUniformSegment>(comp.element);
      item["kind"] = "loguniform";
      item["a"] = seg.lower;
      item["b"] = seg.upper;
    }
    doc["components"].push_back(std::move(item));
  }
  os << doc.dump(2) << '\n';
}

PricingPolicy read_policy_json(std::istream& is) {
  const auto doc = nlohmann::json::parse(is);
  std::vector<PolicyComponent> comps;
  for (const auto& item : doc.at("components")) {
    const double weight = item.at("weight").get<double>();
    const std::string kind = item.at("kind").get<std::string>();
    if (kind == "offer") {
      comps.push_back({weight, Offer(item.at("p").get<double>(),
                                     item.at("r").get<double>())});
    } else if (kind == "loguniform") {
      comps.push_back({weight, LogUniformSegment(item.at("a").get<double>(),
                                                 item.at("b").get<double>())});
    } else {
      throw std::invalid_argument("read_policy_json: unknown kind " + kind);
    }
  }
  return PricingPolicy(std::move(comps));
}

}  // namespace refundlab

// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "refundlab/adversary.hpp"
#include "refundlab/evaluate.hpp"
#include "refundlab/market.hpp"
#include "refundlab/policy.hpp"
#include "refundlab/rng.hpp"

using namespace refundlab;

TEST_CASE("worst case of a posted price is the textbook formula") {
  for (double mu : {0.3, 0.6, 0.9}) {
    const MarketParams params(mu, 0.0);
    for (double p : {0.1 * mu, 0.5 * mu, 0.9 * mu}) {
      const PricingPolicy policy({{1.0, Offer::non_refundable(p)}});
      const auto env = worst_case(
          profile(policy, params, TieRule::kAdversarial), mu);
      CHECK(env.value ==
            doctest::Approx(p * (mu - p) / (1.0 - p)).epsilon(1e-9));
    }
  }
}

TEST_CASE("envelope value and the pairwise oracle coincide") {
  Rng rng = Rng::seeded(31);
  for (int t = 0; t < 12; ++t) {
    const double mu = 0.2 + 0.6 * rng.uniform();
    const double gamma = rng.uniform();
    const MarketParams params(mu, gamma);
    std::vector<PolicyComponent> comps;
    const double p1 = 0.1 + 0.8 * rng.uniform();
    const double a = 0.05 + 0.4 * rng.uniform();
    comps.push_back({0.5, Offer::non_refundable(p1)});
    comps.push_back({0.5, LogUniformSegment(a, a + 0.5)});
    const PricingPolicy policy(std::move(comps));
    const auto prof = profile(policy, params, TieRule::kAdversarial);
    const auto env = worst_case(prof, mu, 2001);
    const double oracle = worst_case_oracle(prof, mu, 2001);
    CHECK(env.value == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("the witness attains the envelope value and the mean constraint") {
  const MarketParams params(0.75, 0.8);
  const auto policy = robust_random_pricing(0.75);
  const auto prof = profile(policy, params, TieRule::kAdversarial);
  const auto env = worst_case(prof, 0.75);
  CHECK(env.witness.mean() == doctest::Approx(0.75).epsilon(1e-9));
  double attained = 0.0;
  for (const Atom& atom : env.witness.atoms())
    attained += atom.mass * prof.value(atom.location);
  CHECK(attained == doctest::Approx(env.value).epsilon(1e-9));
  CHECK(env.chord_lower <= 0.75);
  CHECK(env.chord_upper >= 0.75);
}

TEST_CASE("the robust policy leaves the adversary nothing to gain") {
  for (double gamma : {0.0, 0.3, 0.6, 0.8, 1.0}) {
    const MarketParams params(0.75, gamma);
    const double v_star = best_guaranteed_profit(params).v_star;
    const auto prof =
        profile(robust_refund_policy(params), params, TieRule::kAdversarial);
    CHECK(worst_case(prof, 0.75).value ==
          doctest::Approx(v_star).epsilon(1e-8));
  }
}

TEST_CASE("an infeasible mean is rejected") {
  const MarketParams params(0.75, 0.0);
  const auto prof = profile(PricingPolicy({{1.0, Offer::non_refundable(0.5)}}),
                            params, TieRule::kAdversarial);
  CHECK_THROWS_AS(worst_case(prof, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(worst_case(prof, -0.1), std::invalid_argument);
}

TEST_CASE("best deterministic price") {
  const auto res = robust_price(0.75);
  CHECK(res.price == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.guarantee == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(res.grid_price - res.price) <= 1e-3);
  CHECK(std::abs(res.grid_guarantee - res.guarantee) <= 1e-6);

  const auto flat = robust_price(0.19);
  CHECK(flat.price == doctest::Approx(1.0 - std::sqrt(0.81)).epsilon(1e-12));
}

TEST_CASE("deterministic pricing never beats the refund policy guarantee") {
  for (double mu : {0.25, 0.5, 0.75}) {
    const double det = robust_price(mu).guarantee;
    for (double gamma : {0.0, 0.5, 1.0}) {
      const double v =
          best_guaranteed_profit(MarketParams(mu, gamma)).v_star;
      CHECK(det <= v + 1e-12);
    }
  }
}

// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "refundlab/market.hpp"

using namespace refundlab;

TEST_CASE("lambert lower branch satisfies its defining identity") {
  for (double x : {-0.367879, -0.3, -0.2, -0.1, -0.05, -0.01, -1e-6}) {
    const double w = lambert_w_minus1(x);
    CHECK(w <= -1.0);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12);
  }
}

TEST_CASE("lambert lower branch matches frozen reference values") {
  // References from an independent 200-step bisection of w e^w = x.
  CHECK(lambert_w_minus1(-0.05) == doctest::Approx(-4.49975528852349).epsilon(1e-12));
  CHECK(lambert_w_minus1(-0.1) == doctest::Approx(-3.5771520639573).epsilon(1e-12));
  CHECK(lambert_w_minus1(-0.2) == doctest::Approx(-2.54264135777353).epsilon(1e-12));
  CHECK(lambert_w_minus1(-1.0 / std::exp(1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("lambert lower branch rejects arguments outside [-1/e, 0)") {
  CHECK_THROWS_AS(lambert_w_minus1(-0.4), std::domain_error);
  CHECK_THROWS_AS(lambert_w_minus1(0.0), std::domain_error);
  CHECK_THROWS_AS(lambert_w_minus1(0.1), std::domain_error);
}

TEST_CASE("branch threshold") {
  CHECK(gamma_bar(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gamma_bar(0.5) == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-15));
  CHECK(gamma_bar(0.0) == 0.0);
  CHECK_THROWS_AS(gamma_bar(-0.1), std::domain_error);
  CHECK_THROWS_AS(gamma_bar(1.0), std::domain_error);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(MarketParams(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(MarketParams(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(MarketParams(0.5, -0.1), std::domain_error);
  CHECK_THROWS_AS(MarketParams(0.5, 1.1), std::domain_error);
  CHECK(MarketParams(0.5, 1.0).raw_cost() ==
        std::numeric_limits<double>::infinity());
  CHECK(MarketParams(0.5, 0.8).raw_cost() == doctest::Approx(4.0));
}

TEST_CASE("guarantee on the cheap-returns branch is the refund payoff") {
  const auto sol = best_guaranteed_profit(MarketParams(0.75, 0.25));
  CHECK(sol.branch == CostBranch::kLow);
  CHECK(sol.v_star == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(sol.beta_star == 1.0);
}

TEST_CASE("guarantee is continuous at the branch threshold") {
  const auto at = best_guaranteed_profit(MarketParams(0.75, 0.5));
  CHECK(at.v_star == doctest::Approx(0.5).epsilon(1e-14));
  const auto lo = best_guaranteed_profit(MarketParams(0.75, 0.5 - 1e-9));
  const auto hi = best_guaranteed_profit(MarketParams(0.75, 0.5 + 1e-9));
  CHECK(std::abs(lo.v_star - hi.v_star) <= 1e-7);
  CHECK(hi.beta_star <= 1.0);
}

TEST_CASE("guarantee on the expensive-returns branch, frozen references") {
  // References from an independent bisection of V (2 - g + log g - log V) = mu.
  auto sol = best_guaranteed_profit(MarketParams(0.75, 0.8));
  CHECK(sol.branch == CostBranch::kHigh);
  CHECK(sol.v_star == doctest::Approx(0.391963700255892).epsilon(1e-12));
  CHECK(sol.beta_star == doctest::Approx(0.218951933385544).epsilon(1e-12));

  sol = best_guaranteed_profit(MarketParams(0.75, 0.6));
  CHECK(sol.v_star == doctest::Approx(0.436543631370543).epsilon(1e-12));
  CHECK(sol.beta_star == doctest::Approx(0.557070999423962).epsilon(1e-12));

  sol = best_guaranteed_profit(MarketParams(0.5, 0.9));
  CHECK(sol.v_star == doctest::Approx(0.187281042055128).epsilon(1e-12));
  CHECK(sol.beta_star == doctest::Approx(0.0598879720263532).epsilon(1e-12));
}

TEST_CASE("pure random pricing guarantee, frozen references") {
  CHECK(best_guaranteed_profit(MarketParams(0.25, 1.0)).v_star ==
        doctest::Approx(0.0677023404412486).epsilon(1e-12));
  CHECK(best_guaranteed_profit(MarketParams(0.5, 1.0)).v_star ==
        doctest::Approx(0.186682308850837).epsilon(1e-12));
  CHECK(best_guaranteed_profit(MarketParams(0.75, 1.0)).v_star ==
        doctest::Approx(0.38240356960216).epsilon(1e-12));
}

TEST_CASE("two independent routes to the guarantee agree everywhere") {
  for (int i = 1; i <= 19; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const MarketParams params(i / 20.0, j / 20.0);
      const double a = best_guaranteed_profit(params).v_star;
      const double b = best_guaranteed_profit_by_integral(params);
      CHECK(std::abs(a - b) <= 1e-9);
    }
  }
}

TEST_CASE("guarantee decreases in the normalized cost and stays in (0, mu]") {
  for (double mu : {0.25, 0.5, 0.9}) {
    double prev = mu + 1.0;
    for (int j = 0; j <= 100; ++j) {
      const double v =
          best_guaranteed_profit(MarketParams(mu, j / 100.0)).v_star;
      CHECK(v > 0.0);
      CHECK(v <= mu);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("frictionless limit gives the full surplus") {
  CHECK(best_guaranteed_profit(MarketParams(0.3, 0.0)).v_star ==
        doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("rescaling a non-unit match value") {
  const auto r = rescale_market(2.0, 3.0);
  CHECK(r.gamma_tilde == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(r.marginal_signal == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r.scale == 2.0);

  const auto free_returns = rescale_market(1.0, 0.0);
  CHECK(free_returns.marginal_signal == 0.0);

  const auto no_returns =
      rescale_market(1.0, std::numeric_limits<double>::infinity());
  CHECK(no_returns.gamma_tilde == 1.0);
  CHECK(no_returns.marginal_signal == 1.0);

  CHECK_THROWS_AS(rescale_market(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(rescale_market(1.0, -1.0), std::domain_error);
}

// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "refundlab/distribution.hpp"
#include "refundlab/market.hpp"
#include "refundlab/mechanism.hpp"
#include "refundlab/rng.hpp"

using namespace refundlab;

TEST_CASE("allocation validation") {
  CHECK_THROWS_AS(
      mechanism_value({{0.2, 0.1}, {0.0, 1.0}}, make_point_mass(0.2), 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      mechanism_value({{0.1, 0.2}, {1.0, 0.0}}, make_point_mass(0.2), 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      mechanism_value({{0.1, 0.2}, {0.0, 1.5}}, make_point_mass(0.2), 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      mechanism_value({{0.1, 0.2}, {0.0, 1.0}}, make_point_mass(0.3), 0.5),
      std::invalid_argument);
}

TEST_CASE("per-report profit of a threshold allocation is the threshold") {
  // alpha0 = 1[q >= t] prices the good at t for every buying report.
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  const MechanismAllocation alloc{grid, {0.0, 0.0, 1.0, 1.0, 1.0}};
  CHECK(per_signal_mechanism_profit(alloc, 0, 0.9) == 0.0);
  CHECK(per_signal_mechanism_profit(alloc, 2, 0.9) == doctest::Approx(0.5));
  CHECK(per_signal_mechanism_profit(alloc, 3, 0.9) == doctest::Approx(0.5));
  // Above gamma the non-allocated share is pushed through the refund channel.
  CHECK(per_signal_mechanism_profit(alloc, 4, 0.9) == doctest::Approx(0.5));
  const MechanismAllocation none{grid, {0.0, 0.0, 0.0, 0.0, 0.0}};
  CHECK(per_signal_mechanism_profit(none, 4, 0.9) == doctest::Approx(1.0));
  CHECK(per_signal_mechanism_profit(none, 3, 0.9) == doctest::Approx(0.0));
}

TEST_CASE("buyer payoff is the running allocation integral") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const MechanismAllocation alloc{grid, {0.0, 1.0, 1.0}};
  const auto dist = make_discrete({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5});
  CHECK(mechanism_buyer_payoff(alloc, dist) ==
        doctest::Approx(0.5 * 0.5).epsilon(1e-15));
}

TEST_CASE("threshold scan equals exhaustive enumeration on small supports") {
  Rng rng = Rng::seeded(17);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 9.0);
    std::vector<double> locs(n), masses(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      locs[i] = rng.uniform();
      masses[i] = 0.05 + rng.uniform();
      total += masses[i];
    }
    std::sort(locs.begin(), locs.end());
    for (auto& m : masses) m /= total;
    const auto dist = make_discrete(locs, masses);
    const MarketParams params(0.2 + 0.6 * rng.uniform(), rng.uniform());
    const double scan = optimal_mechanism(dist, params).value;

    double brute = -1.0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      std::vector<double> a(n);
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = (mask >> i) & 1 ? 1.0 : 0.0;
        if (i > 0 && a[i] < a[i - 1]) ok = false;
      }
      if (!ok) continue;
      brute = std::max(brute,
                       mechanism_value({locs, std::move(a)}, dist,
                                       params.gamma));
    }
    CHECK(scan == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("value ties break toward the buyer") {
  // With mass 1/2 at 0.5 and at 1, thresholds at 0.5, at 1 and "never
  // allocate" all earn 0.5; only the first leaves the buyer a rent.
  const auto dist = make_discrete({0.5, 1.0}, {0.5, 0.5});
  const auto opt = optimal_mechanism(dist, MarketParams(0.75, 1.0));
  CHECK(opt.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(opt.buyer_payoff == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("optimal value against the least favorable distribution is the guarantee") {
  for (double gamma : {0.25, 0.8, 1.0}) {
    const MarketParams params(0.75, gamma);
    const double v_star = best_guaranteed_profit(params).v_star;
    const auto opt =
        optimal_mechanism_discretized(make_worst_case(params), params, 2001);
    CHECK(std::abs(opt.value - v_star) <= 2e-3);
  }
}

TEST_CASE("discretization error shrinks with the grid") {
  const MarketParams params(0.75, 0.8);
  const double v_star = best_guaranteed_profit(params).v_star;
  double prev = 1.0;
  for (std::size_t n : {std::size_t{251}, std::size_t{1001},
                        std::size_t{4001}}) {
    const auto opt =
        optimal_mechanism_discretized(make_worst_case(params), params, n);
    const double err = std::abs(opt.value - v_star);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("every monotone allocation earns the same against the least favorable distribution") {
  Rng rng = Rng::seeded(404);
  for (double gamma : {0.6, 0.8, 1.0}) {
    const auto rep = verify_indeterminacy(MarketParams(0.75, gamma), 2001, rng);
    CHECK(rep.battery_size >= 9);
    CHECK(rep.spread <= 2e-3);
    CHECK(std::abs(rep.min_value - rep.v_star) <= 2e-3);
    CHECK(std::abs(rep.max_value - rep.v_star) <= 2e-3);
  }
}

TEST_CASE("buyer-side certification at the least favorable distribution") {
  Rng rng = Rng::seeded(808);
  const MarketParams params(0.75, 0.8);
  const RobustSolution sol = best_guaranteed_profit(params);
  std::vector<SignalDistribution> battery{
      make_point_mass(0.75), make_full_info(0.75),
      make_discrete({0.5, 1.0}, {0.5, 0.5}, 0.75)};
  const auto report = buyer_optimal_check(params, battery, 2001);
  CHECK(report.posted_price_profit ==
        doctest::Approx(sol.v_star).epsilon(1e-10));
  CHECK(report.posted_price_payoff ==
        doctest::Approx(0.75 - sol.v_star).epsilon(1e-10));
  for (const auto& out : report.outcomes) {
    CHECK(out.seller_value >= sol.v_star - 1e-3);
    CHECK(out.buyer_payoff <= 0.75 - sol.v_star + 1e-3);
  }
  CHECK(std::abs(report.at_worst_case.seller_value - sol.v_star) <= 2e-3);
}

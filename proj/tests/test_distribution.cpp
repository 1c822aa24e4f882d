// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "refundlab/distribution.hpp"
#include "refundlab/market.hpp"
#include "refundlab/rng.hpp"

using namespace refundlab;

namespace {

const MarketParams kCases[] = {
    {0.75, 0.25}, {0.75, 0.5}, {0.75, 0.8}, {0.5, 0.9}, {0.25, 0.7},
    {0.5, 1.0},   {0.9, 0.1},
};

}  // namespace

TEST_CASE("least favorable distribution is a mean-mu CDF") {
  for (const auto& params : kCases) {
    const auto dist = make_worst_case(params);
    CHECK(dist.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.mean() == doctest::Approx(params.mu).epsilon(1e-11));
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double f = dist.cdf(i / 200.0);
      CHECK(f >= prev);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0 + 1e-15);
      prev = f;
    }
  }
}

TEST_CASE("area under the least favorable CDF matches the mean constraint") {
  for (const auto& params : kCases) {
    const auto dist = make_worst_case(params);
    CHECK(dist.integral_cdf(0.0, 1.0) ==
          doctest::Approx(1.0 - params.mu).epsilon(1e-12));
  }
}

TEST_CASE("least favorable CDF puts no mass below the guarantee") {
  for (const auto& params : kCases) {
    const double v_star = best_guaranteed_profit(params).v_star;
    const auto dist = make_worst_case(params);
    CHECK(dist.cdf(v_star * (1.0 - 1e-9)) == 0.0);
  }
}

TEST_CASE("closed-form CDF area agrees with a Riemann sum") {
  const auto dist = make_worst_case(MarketParams(0.75, 0.8));
  const int n = 200000;
  double acc = 0.0;
  const double a = 0.1, b = 0.93;
  for (int i = 0; i < n; ++i)
    acc += dist.cdf(a + (b - a) * (i + 0.5) / n) * (b - a) / n;
  CHECK(dist.integral_cdf(a, b) == doctest::Approx(acc).epsilon(1e-5));
}

TEST_CASE("unit elastic distribution coincides with the worst case at gamma one") {
  const auto rs = make_rs(0.6);
  const auto wc = make_worst_case(MarketParams(0.6, 1.0));
  for (int i = 0; i <= 100; ++i)
    CHECK(rs.cdf(i / 100.0) == doctest::Approx(wc.cdf(i / 100.0)).epsilon(1e-14));
}

TEST_CASE("point mass and full information distributions") {
  const auto pm = make_point_mass(0.4);
  CHECK(pm.mean() == doctest::Approx(0.4));
  CHECK(pm.cdf(0.39) == 0.0);
  CHECK(pm.cdf(0.4) == 1.0);

  const auto fi = make_full_info(0.4);
  CHECK(fi.mean() == doctest::Approx(0.4));
  CHECK(fi.cdf(0.0) == doctest::Approx(0.6));
  CHECK(fi.cdf(0.999) == doctest::Approx(0.6));
  CHECK(fi.cdf(1.0) == 1.0);
}

TEST_CASE("construction rejects malformed inputs") {
  CHECK_THROWS_AS(make_discrete({0.2, 0.1}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({0.2, 0.4}, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({0.2, 1.4}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_discrete({0.2, 0.4}, {0.5, 0.5}, 0.9),
                  std::invalid_argument);
  CHECK_NOTHROW(make_discrete({0.2, 0.4}, {0.5, 0.5}, 0.3));
}

TEST_CASE("discretization preserves total mass and the mean") {
  for (const auto& params : kCases) {
    const auto dist = make_worst_case(params);
    for (std::size_t n : {std::size_t{51}, std::size_t{501}}) {
      const auto d = dist.discretize(n);
      CHECK(d.is_discrete());
      CHECK(d.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(d.mean() == doctest::Approx(dist.mean()).epsilon(1e-12));
    }
  }
}

TEST_CASE("discretized CDF converges to the smooth one") {
  const auto dist = make_worst_case(MarketParams(0.75, 0.8));
  const auto d = dist.discretize(2001);
  double worst = 0.0;
  for (int i = 1; i < 100; ++i)
    worst = std::max(worst,
                     std::abs(d.cdf(i / 100.0) - dist.cdf(i / 100.0)));
  CHECK(worst <= 2e-3);
}

TEST_CASE("sampling matches the CDF within the DKW band") {
  const auto dist = make_worst_case(MarketParams(0.75, 0.8));
  Rng rng = Rng::seeded(99);
  const std::size_t n = 20000;
  auto draws = dist.sample(rng, n);
  REQUIRE(draws.size() == n);
  // sup-norm bound at confidence 1 - 1e-6
  const double band = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
  for (int i = 0; i <= 100; ++i) {
    const double q = i / 100.0;
    double below = 0.0;
    for (double d : draws)
      if (d <= q) below += 1.0;
    CHECK(std::abs(below / n - dist.cdf(q)) <= band);
  }
}

TEST_CASE("samples of a discrete distribution hit the support") {
  const auto dist = make_discrete({0.1, 0.6, 1.0}, {0.25, 0.5, 0.25});
  Rng rng = Rng::seeded(7);
  for (double d : dist.sample(rng, 1000))
    CHECK((d == 0.1 || d == 0.6 || d == 1.0));
}

TEST_CASE("atoms accessor requires a discrete distribution") {
  const auto wc = make_worst_case(MarketParams(0.75, 0.8));
  CHECK_FALSE(wc.is_discrete());
  CHECK_THROWS_AS(wc.atoms(), std::logic_error);
  const auto d = make_discrete({0.3, 0.7}, {0.4, 0.6});
  const auto atoms = d.atoms();
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].location == 0.3);
  CHECK(atoms[1].mass == 0.6);
}

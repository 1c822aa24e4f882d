// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include "refundlab/adversary.hpp"
#include "refundlab/distribution.hpp"
#include "refundlab/evaluate.hpp"
#include "refundlab/market.hpp"
#include "refundlab/mechanism.hpp"
#include "refundlab/policy.hpp"

using namespace refundlab;

static void BM_lambert(benchmark::State& state) {
  double x = -0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w_minus1(x));
  }
}
BENCHMARK(BM_lambert);

static void BM_guarantee_closed_form(benchmark::State& state) {
  const MarketParams params(0.75, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_guaranteed_profit(params).v_star);
  }
}
BENCHMARK(BM_guarantee_closed_form);

static void BM_guarantee_by_integral(benchmark::State& state) {
  const MarketParams params(0.75, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_guaranteed_profit_by_integral(params));
  }
}
BENCHMARK(BM_guarantee_by_integral);

static void BM_profit_generic(benchmark::State& state) {
  const MarketParams params(0.75, 0.8);
  const auto policy = robust_refund_policy(params);
  const auto dist = make_worst_case(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(profit_generic(policy, dist, params));
  }
}
BENCHMARK(BM_profit_generic);

static void BM_worst_case_envelope(benchmark::State& state) {
  const MarketParams params(0.75, 0.8);
  const auto prof =
      profile(robust_refund_policy(params), params, TieRule::kAdversarial);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(worst_case(prof, 0.75, n).value);
  }
}
BENCHMARK(BM_worst_case_envelope)->Arg(1001)->Arg(10001);

static void BM_optimal_mechanism(benchmark::State& state) {
  const MarketParams params(0.75, 0.8);
  const auto dist =
      make_worst_case(params).discretize(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_mechanism(dist, params).value);
  }
}
BENCHMARK(BM_optimal_mechanism)->Arg(251)->Arg(2001);

BENCHMARK_MAIN();

// SPDX-License-Identifier: MIT
#include "refundlab/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "refundlab/evaluate.hpp"

namespace refundlab {

namespace {

// Running right-continuous step integrals I_i = int_0^{q_i} alpha0.
std::vector<double> step_integrals(const std::vector<double>& grid,
                                   const std::vector<double>& alpha0) {
  std::vector<double> integral(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i)
    integral[i] =
        integral[i - 1] + alpha0[i - 1] * (grid[i] - grid[i - 1]);
  return integral;
}

double report_profit(double q, double a0, double running_integral,
                     double gamma) {
  double v = q * a0 - running_integral;
  if (gamma < 1.0) {
    if (q >= gamma) v += (q - gamma) / (1.0 - gamma) * (1.0 - a0);
  } else if (q >= 1.0) {
    v += 1.0 - a0;  // gamma = 1 limit: only the q = 1 report keeps the unit
  }
  return v;
}

void validate(const MechanismAllocation& alloc) {
  if (alloc.grid.size() != alloc.alpha0.size() || alloc.grid.empty())
    throw std::invalid_argument("MechanismAllocation: size mismatch");
  if (!std::is_sorted(alloc.grid.begin(), alloc.grid.end()))
    throw std::invalid_argument("MechanismAllocation: grid must ascend");
  for (std::size_t i = 0; i < alloc.alpha0.size(); ++i) {
    if (!(alloc.alpha0[i] >= 0.0 && alloc.alpha0[i] <= 1.0))
      throw std::invalid_argument("MechanismAllocation: alpha0 outside [0,1]");
    if (i > 0 && alloc.alpha0[i] < alloc.alpha0[i - 1])
      throw std::invalid_argument("MechanismAllocation: alpha0 must ascend");
  }
}

std::vector<double> masses_on_grid(const MechanismAllocation& alloc,
                                   const SignalDistribution& dist) {
  std::vector<double> masses(alloc.grid.size(), 0.0);
  for (const Atom& a : dist.atoms()) {
    auto it = std::lower_bound(alloc.grid.begin(), alloc.grid.end(),
                               a.location);
    if (it == alloc.grid.end() || *it != a.location)
      throw std::invalid_argument(
          "mechanism_value: distribution atom off the allocation grid");
    masses[static_cast<std::size_t>(it - alloc.grid.begin())] += a.mass;
  }
  return masses;
}

}  // namespace

double per_signal_mechanism_profit(const MechanismAllocation& alloc,
                                   std::size_t q_index, double gamma) {
  validate(alloc);
  if (q_index >= alloc.grid.size())
    throw std::invalid_argument("per_signal_mechanism_profit: bad index");
  const auto integral = step_integrals(alloc.grid, alloc.alpha0);
  return report_profit(alloc.grid[q_index], alloc.alpha0[q_index],
                       integral[q_index], gamma);
}

double mechanism_value(const MechanismAllocation& alloc,
                       const SignalDistribution& dist, double gamma) {
  validate(alloc);
  const auto masses = masses_on_grid(alloc, dist);
  const auto integral = step_integrals(alloc.grid, alloc.alpha0);
  double acc = 0.0;
  for (std::size_t i = 0; i < alloc.grid.size(); ++i)
    if (masses[i] > 0.0)
      acc += masses[i] * report_profit(alloc.grid[i], alloc.alpha0[i],
                                       integral[i], gamma);
  return acc;
}

double mechanism_buyer_payoff(const MechanismAllocation& alloc,
                              const SignalDistribution& dist) {
  validate(alloc);
  const auto masses = masses_on_grid(alloc, dist);
  const auto integral = step_integrals(alloc.grid, alloc.alpha0);
  double acc = 0.0;
  for (std::size_t i = 0; i < alloc.grid.size(); ++i)
    acc += masses[i] * integral[i];
  return acc;
}

OptimalMechanism optimal_mechanism(const SignalDistribution& discrete_dist,
                                   const MarketParams& params) {
  const auto atoms = discrete_dist.atoms();
  const std::size_t n = atoms.size();
  std::vector<double> grid(n), masses(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = atoms[i].location;
    masses[i] = atoms[i].mass;
  }

  OptimalMechanism best{};
  bool have_best = false;
  // Threshold t = grid[k] means alpha0 = 1[q >= grid[k]]; k = n is all-zero.
  for (std::size_t k = 0; k <= n; ++k) {
    MechanismAllocation alloc{grid, std::vector<double>(n, 0.0)};
    for (std::size_t i = k; i < n; ++i) alloc.alpha0[i] = 1.0;
    const double value = mechanism_value(alloc, discrete_dist, params.gamma);
    const double payoff = mechanism_buyer_payoff(alloc, discrete_dist);
    const bool better =
        !have_best || value > best.value + 1e-12 ||
        (value > best.value - 1e-12 && payoff > best.buyer_payoff);
    if (better) {
      best = OptimalMechanism{std::move(alloc), value, payoff};
      have_best = true;
    }
  }
  return best;
}

OptimalMechanism optimal_mechanism_discretized(const SignalDistribution& dist,
                                               const MarketParams& params,
                                               std::size_t grid_n) {
  if (dist.is_discrete()) return optimal_mechanism(dist, params);
  return optimal_mechanism(dist.discretize(grid_n), params);
}

IndeterminacyReport verify_indeterminacy(const MarketParams& params,
                                         std::size_t grid_n, Rng& rng) {
  const RobustSolution sol = best_guaranteed_profit(params);
  const auto dist = make_worst_case(params).discretize(grid_n);
  const auto atoms = dist.atoms();
  std::vector<double> grid(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) grid[i] = atoms[i].location;

  std::vector<std::vector<double>> battery;
  battery.emplace_back(grid.size(), 0.0);
  battery.emplace_back(grid.size(), 1.0);
  for (double threshold : {params.gamma, sol.v_star}) {
    std::vector<double> a(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] >= threshold) a[i] = 1.0;
    battery.push_back(std::move(a));
  }
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> a(grid.size());
    double run = 0.0;
    for (auto& v : a) {
      run += rng.uniform();
      v = run;
    }
    for (auto& v : a) v /= run;  // nondecreasing, ends at 1
    battery.push_back(std::move(a));
  }

  IndeterminacyReport rep{sol.v_star,
                          std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity(), 0.0,
                          battery.size()};
  for (auto& alpha0 : battery) {
    MechanismAllocation alloc{grid, std::move(alpha0)};
    const double value = mechanism_value(alloc, dist, params.gamma);
    rep.min_value = std::min(rep.min_value, value);
    rep.max_value = std::max(rep.max_value, value);
  }
  rep.spread = rep.max_value - rep.min_value;
  return rep;
}

BuyerOptimalReport buyer_optimal_check(
    const MarketParams& params,
    const std::vector<SignalDistribution>& battery, std::size_t grid_n) {
  const RobustSolution sol = best_guaranteed_profit(params);
  BuyerOptimalReport report{};
  report.mu = params.mu;
  report.v_star = sol.v_star;
  report.outcomes.reserve(battery.size());
  for (const auto& dist : battery) {
    const auto opt = optimal_mechanism_discretized(dist, params, grid_n);
    report.outcomes.push_back({opt.value, opt.buyer_payoff});
  }
  const auto fw = make_worst_case(params);
  const auto opt_fw = optimal_mechanism_discretized(fw, params, grid_n);
  report.at_worst_case = {opt_fw.value, opt_fw.buyer_payoff};

  const PricingPolicy posted({{1.0, Offer(sol.v_star, 0.0)}});
  report.posted_price_profit =
      profit_generic(posted, fw, params, TieRule::kFavorable);
  report.posted_price_payoff =
      buyer_payoff(posted, fw, params, TieRule::kFavorable);
  return report;
}

}  // namespace refundlab

// SPDX-License-Identifier: MIT
#pragma once

#include <limits>

namespace refundlab {

/// Prior mean of the buyer's binary valuation and the seller's restocking
/// cost.  `gamma` is the normalized cost c/(c+1) in [0, 1]; gamma = 1 stands
/// for an infinite raw cost.
struct MarketParams {
  double mu;     ///< Pr(v = 1), in (0, 1)
  double gamma;  ///< normalized restocking cost, in [0, 1]

  MarketParams(double mu_, double gamma_);

  /// Raw restocking cost gamma/(1-gamma); +inf when gamma = 1.
  double raw_cost() const {
    return gamma < 1.0 ? gamma / (1.0 - gamma)
                       : std::numeric_limits<double>::infinity();
  }
};

/// Whether the seller is on the cheap-returns side (gamma <= gamma_bar,
/// where the refund offer alone is optimal) or the expensive-returns side.
enum class CostBranch { kLow, kHigh };

/// Closed-form solution of the seller's guarantee problem.
struct RobustSolution {
  double v_star;     ///< best guaranteed-profit, in (0, 1)
  double gamma_bar;  ///< branch threshold 1 - sqrt(1 - mu)
  double beta_star;  ///< weight on the generous refund, in [0, 1]
  CostBranch branch;
};

/// Lower real branch W_{-1} on [-1/e, 0): the smaller solution of
/// w * e^w = x.  Residual |w e^w - x| <= 1e-12.  Throws std::domain_error
/// outside the branch domain.
double lambert_w_minus1(double x);

/// 1 - sqrt(1 - mu) for mu in (0, 1); throws std::domain_error otherwise.
double gamma_bar(double mu);

/// Best guaranteed-profit and refund-policy weight for the given market.
/// Low branch: v* = (mu - gamma)/(1 - gamma), beta = 1.  High branch: v* is
/// the root of V (2 - gamma + log gamma - log V) = mu, computed through
/// W_{-1}, with beta = (1 - gamma) / (1 - gamma + log gamma - log v*).
RobustSolution best_guaranteed_profit(const MarketParams& params);

/// Independent route to v*: bracketing bisection on the area identity
/// int_0^1 F_w(q) dq = 1 - mu, where F_w is the least favorable signal
/// distribution written directly in terms of the unknown value.  Kept
/// deliberately separate from best_guaranteed_profit so the two can be
/// cross-checked.
double best_guaranteed_profit_by_integral(const MarketParams& params);

/// Reduction of a market with match value v_bar > 0 and raw cost c >= 0 to
/// the unit-value problem.
struct RescaledMarket {
  double gamma_tilde;      ///< c * v_bar / (v_bar + c), in [0, v_bar)
  double marginal_signal;  ///< gamma_tilde / v_bar: the gamma of the unit problem
  double scale;            ///< v_bar; multiplies all unit-problem prices/profits
};

RescaledMarket rescale_market(double v_bar, double c);

}  // namespace refundlab

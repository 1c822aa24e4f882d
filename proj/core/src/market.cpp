// SPDX-License-Identifier: MIT
#include "refundlab/market.hpp"

#include <cmath>
#include <stdexcept>

namespace refundlab {

namespace {

// Residual of the high-branch fixed point V (2 - g + log g - log V) = mu.
// Monotone increasing in V on (0, g e^{1-g}), which contains the root.
double fixed_point_residual(double v, double mu, double gamma) {
  return v * (2.0 - gamma + std::log(gamma) - std::log(v)) - mu;
}

}  // namespace

MarketParams::MarketParams(double mu_, double gamma_) : mu(mu_), gamma(gamma_) {
  if (!(mu > 0.0 && mu < 1.0))
    throw std::domain_error("MarketParams: mu must lie in (0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::domain_error("MarketParams: gamma must lie in [0, 1]");
}

double lambert_w_minus1(double x) {
  const double inv_e = std::exp(-1.0);
  if (!(x < 0.0) || x < -inv_e - 1e-15)
    throw std::domain_error("lambert_w_minus1: x must lie in [-1/e, 0)");
  if (x <= -inv_e) return -1.0;

  auto f = [x](double w) { return w * std::exp(w) - x; };

  // f(-1) <= 0 and f -> -x > 0 as w -> -inf; expand the bracket leftward.
  double hi = -1.0;
  double lo = -2.0;
  while (f(lo) < 0.0 && lo > -746.0) lo *= 2.0;

  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double w = 0.5 * (lo + hi);

  // Halley refinement; skipped when the derivative degenerates near w = -1.
  for (int i = 0; i < 4; ++i) {
    const double ew = std::exp(w);
    const double fw = w * ew - x;
    const double d1 = ew * (1.0 + w);
    if (std::abs(d1) < 1e-12) break;
    const double d2 = ew * (2.0 + w);
    const double denom = 2.0 * d1 * d1 - fw * d2;
    if (denom == 0.0) break;
    const double step = 2.0 * fw * d1 / denom;
    w -= step;
    if (w > -1.0) w = -1.0;
    if (std::abs(step) < 1e-16 * std::abs(w)) break;
  }
  return w;
}

double gamma_bar(double mu) {
  if (!(mu >= 0.0 && mu < 1.0))
    throw std::domain_error("gamma_bar: mu must lie in [0, 1)");
  return 1.0 - std::sqrt(1.0 - mu);
}

RobustSolution best_guaranteed_profit(const MarketParams& params) {
  const double mu = params.mu;
  const double gamma = params.gamma;
  const double gb = gamma_bar(mu);

  if (gamma <= gb) {
    return RobustSolution{(mu - gamma) / (1.0 - gamma), gb, 1.0,
                          CostBranch::kLow};
  }

  const double x = -(mu / gamma) * std::exp(gamma - 2.0);
  double v = -mu / lambert_w_minus1(x);

  // W_{-1} has a square-root singularity at the branch point, so just above
  // gamma_bar the Lambert route loses half the digits.  The fixed point
  // itself is well conditioned in V; polish with Newton on the residual.
  for (int i = 0; i < 4; ++i) {
    const double r = fixed_point_residual(v, mu, gamma);
    const double d = 1.0 - gamma + std::log(gamma / v);  // residual derivative
    if (d <= 0.0) break;
    const double step = r / d;
    v -= step;
    if (std::abs(step) < 1e-16 * v) break;
  }

  const double denom = 1.0 - gamma + std::log(gamma) - std::log(v);
  return RobustSolution{v, gb, (1.0 - gamma) / denom, CostBranch::kHigh};
}

double best_guaranteed_profit_by_integral(const MarketParams& params) {
  const double mu = params.mu;
  const double gamma = params.gamma;

  // int_0^1 F_w(q) dq with the candidate value V in place of v*.
  auto area = [gamma](double v) {
    if (v < gamma)
      return (gamma - v) - v * std::log(gamma / v) +
             (1.0 - v) * (1.0 - gamma);
    return (1.0 - gamma) * (1.0 - v);
  };

  // area(v) decreases from ~1 to 0; bisect on area(v) = 1 - mu.
  const double target = 1.0 - mu;
  double lo = 1e-15;
  double hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (area(mid) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

RescaledMarket rescale_market(double v_bar, double c) {
  if (!(v_bar > 0.0))
    throw std::domain_error("rescale_market: v_bar must be positive");
  if (!(c >= 0.0)) throw std::domain_error("rescale_market: c must be >= 0");
  const double gamma_tilde =
      std::isinf(c) ? v_bar : c * v_bar / (v_bar + c);
  return RescaledMarket{gamma_tilde, gamma_tilde / v_bar, v_bar};
}

}  // namespace refundlab

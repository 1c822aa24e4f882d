// SPDX-License-Identifier: MIT
#include "refundlab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace refundlab {

namespace {

struct GridPoint {
  double q;
  double g;
};

// Uniform grid plus exact breakpoints.  At a breakpoint the achievable value
// for an adversarial atom is the min of the knot value and both one-sided
// limits (an atom a hair to either side realizes the limit).
std::vector<GridPoint> build_grid(const PerSignalProfile& profile,
                                  std::size_t grid_n) {
  if (grid_n < 3) throw std::invalid_argument("worst_case: grid_n < 3");
  std::vector<GridPoint> pts;
  pts.reserve(grid_n + profile.knots().size());
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double q =
        static_cast<double>(i) / static_cast<double>(grid_n - 1);
    pts.push_back({q, profile.value(q)});
  }
  for (std::size_t k = 0; k < profile.knots().size(); ++k) {
    const double q = profile.knots()[k];
    const double g = std::min({profile.knot_values()[k],
                               profile.left_limit(k),
                               profile.right_limit(k)});
    pts.push_back({q, g});
  }
  std::sort(pts.begin(), pts.end(),
            [](const GridPoint& a, const GridPoint& b) {
              return a.q < b.q || (a.q == b.q && a.g < b.g);
            });
  // Duplicate abscissae keep only the cheapest value.
  std::vector<GridPoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts)
    if (out.empty() || out.back().q != p.q) out.push_back(p);
  return out;
}

// Lower convex hull, monotone chain over points already sorted by q.
std::vector<GridPoint> lower_hull(const std::vector<GridPoint>& pts) {
  std::vector<GridPoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross =
          (b.q - a.q) * (p.g - a.g) - (p.q - a.q) * (b.g - a.g);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return hull;
}

}  // namespace

EnvelopeResult worst_case(const PerSignalProfile& profile, double mu,
                          std::size_t grid_n) {
  if (!(mu >= 0.0 && mu <= 1.0))
    throw std::invalid_argument("worst_case: mu outside [0, 1]");
  const auto hull = lower_hull(build_grid(profile, grid_n));

  auto it = std::lower_bound(
      hull.begin(), hull.end(), mu,
      [](const GridPoint& p, double x) { return p.q < x; });
  if (it != hull.end() && it->q == mu) {
    return EnvelopeResult{it->g,
                          SignalDistribution({Atom{it->q, 1.0}}, mu),
                          it->q, it->q};
  }
  const GridPoint& hi = *it;
  const GridPoint& lo = *(it - 1);
  const double lambda = (hi.q - mu) / (hi.q - lo.q);  // mass on lo
  const double value = lambda * lo.g + (1.0 - lambda) * hi.g;
  std::vector<Segment> segs;
  if (lambda > 0.0) segs.push_back(Atom{lo.q, lambda});
  if (lambda < 1.0) segs.push_back(Atom{hi.q, 1.0 - lambda});
  return EnvelopeResult{value, SignalDistribution(std::move(segs), mu),
                        lo.q, hi.q};
}

double worst_case_oracle(const PerSignalProfile& profile, double mu,
                         std::size_t grid_n) {
  const auto pts = build_grid(profile, grid_n);
  if (mu < pts.front().q || mu > pts.back().q)
    throw std::invalid_argument("worst_case_oracle: mu outside the grid");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    if (p.q == mu) best = std::min(best, p.g);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].q >= mu) break;
    for (std::size_t j = pts.size(); j-- > 0;) {
      if (pts[j].q <= mu) break;
      const double lambda = (pts[j].q - mu) / (pts[j].q - pts[i].q);
      best = std::min(best,
                      lambda * pts[i].g + (1.0 - lambda) * pts[j].g);
    }
  }
  return best;
}

RobustPriceResult robust_price(double mu, double grid_step) {
  if (!(mu > 0.0 && mu < 1.0))
    throw std::invalid_argument("robust_price: mu outside (0, 1)");
  const double price = 1.0 - std::sqrt(1.0 - mu);
  RobustPriceResult res{price, price * price, 0.0, 0.0};
  for (double p = grid_step; p < mu; p += grid_step) {
    const double g = p * (mu - p) / (1.0 - p);
    if (g > res.grid_guarantee) {
      res.grid_guarantee = g;
      res.grid_price = p;
    }
  }
  return res;
}

}  // namespace refundlab

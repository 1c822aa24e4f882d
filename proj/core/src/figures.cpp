// SPDX-License-Identifier: MIT
#include "refundlab/figures.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "refundlab/adversary.hpp"
#include "refundlab/distribution.hpp"

namespace refundlab {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_fig1_csv(std::ostream& os, const MarketParams& params) {
  const auto dist = make_worst_case(params);
  const double v_star = best_guaranteed_profit(params).v_star;
  os << "q,F_w,unit_elastic_bound\n";
  for (int i = 1; i <= 1000; ++i) {
    const double q = static_cast<double>(i) / 1000.0;
    os << format_value(q) << ',' << format_value(dist.cdf(q)) << ','
       << format_value(1.0 - v_star / q) << '\n';
  }
}

void write_fig2_csv(std::ostream& os, double mu,
                    const std::vector<double>& gammas) {
  const double v1 = best_guaranteed_profit(MarketParams(mu, 1.0)).v_star;
  const double det = robust_price(mu).guarantee;
  os << "gamma,v_star,v_one_star,robust_price,generous_alone\n";
  for (double gamma : gammas) {
    const double v = best_guaranteed_profit(MarketParams(mu, gamma)).v_star;
    const double generous_alone =
        gamma < 1.0 ? std::max(0.0, (mu - gamma) / (1.0 - gamma)) : 0.0;
    os << format_value(gamma) << ',' << format_value(v) << ','
       << format_value(v1) << ',' << format_value(det) << ','
       << format_value(generous_alone) << '\n';
  }
}

std::string fig1_file_name(double gamma) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "fig1_%g.csv", gamma);
  return buf;
}

}  // namespace refundlab

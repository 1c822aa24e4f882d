// SPDX-License-Identifier: MIT
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "refundlab/market.hpp"

namespace refundlab {

/// "%.12g" — the fixed text format of every report the project emits, so
/// outputs diff cleanly across runs.
std::string format_value(double v);

/// Worst-case CDF data: columns q, F_w(q), 1 - v*/q on the q-grid
/// {0.001, 0.002, ..., 1}.
void write_fig1_csv(std::ostream& os, const MarketParams& params);

/// Guarantee comparison per gamma: columns gamma, v*, V_1*, the
/// deterministic robust-price guarantee, and the generous-refund-alone
/// guarantee.
void write_fig2_csv(std::ostream& os, double mu,
                    const std::vector<double>& gammas);

/// File name used for a fig1 slice, e.g. "fig1_0.8.csv".
std::string fig1_file_name(double gamma);

}  // namespace refundlab

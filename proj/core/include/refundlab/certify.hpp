// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

namespace refundlab {

struct CriterionResult {
  int id;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

/// Runs the full certification battery (closed-form agreement, minimax
/// certificate, dominance, deterministic-price worst case, random-pricing
/// cap, mechanism indeterminacy, buyer-optimal equilibrium, three-route
/// agreement, figure reproduction).  `fixtures_dir` must contain
/// fig1_0.25.csv, fig1_0.8.csv and fig2.csv for the byte-identity check;
/// when empty, the figure criterion checks the analytic properties only.
std::vector<CriterionResult> run_certification(const std::string& fixtures_dir);

bool all_passed(const std::vector<CriterionResult>& results);

/// One line per criterion: "PASS  3  strict-dominance  (0.12 s)  detail".
void print_results(std::ostream& os,
                   const std::vector<CriterionResult>& results);

}  // namespace refundlab

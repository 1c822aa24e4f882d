// SPDX-License-Identifier: MIT
// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  The optional argument is the directory holding the committed
// figure CSVs.
#include <iostream>
#include <string>

#include "refundlab/certify.hpp"

int main(int argc, char** argv) {
  const std::string fixtures = argc > 1 ? argv[1] : "";
  const auto results = refundlab::run_certification(fixtures);
  refundlab::print_results(std::cout, results);
  return refundlab::all_passed(results) ? 0 : 1;
}

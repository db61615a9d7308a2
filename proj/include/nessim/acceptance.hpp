// End-to-end verification suite: each criterion pins its tolerances in code
// and prints one pass/fail line. Used by the `verify` CLI subcommand and the
// acceptance test binary.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nessim::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs all criteria in order, streaming one result line per criterion.
std::vector<CriterionResult> run_all(std::ostream& out);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace nessim::acceptance

// Verification suite entry point: one pass/fail line per criterion,
// nonzero exit when any criterion fails.
#include <iostream>

#include "nessim/acceptance.hpp"

int main() {
    const auto results = nessim::acceptance::run_all(std::cout);
    const bool ok = nessim::acceptance::all_passed(results);
    std::cout << (ok ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << std::endl;
    return ok ? 0 : 1;
}

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// End-to-end verification suite. Each criterion runs at a pinned tolerance
// and prints one pass/fail line; the CLI `verify` subcommand and the
// dedicated acceptance test binary both drive this runner.

namespace kgnr::acceptance {

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
    double runtime_s;
};

inline constexpr int criterion_count = 7;

// Runs one criterion (1-based id) and prints its pass/fail line.
CriterionResult run_one(int id, std::ostream& log);
std::vector<CriterionResult> run_all(std::ostream& log);
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace kgnr::acceptance

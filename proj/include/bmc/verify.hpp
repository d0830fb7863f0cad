#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bmc::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string target;
    std::string measured;
    bool pass = false;
    double seconds = 0.0;
};

/// Runs the numbered verification criteria (all of them when `only` is 0,
/// else the selected one). Deterministic given the seed; Monte Carlo
/// criteria derive their trial seeds from it.
std::vector<CriterionResult> run_criteria(std::uint64_t seed, unsigned workers = 0, int only = 0);

/// Number of defined criteria.
int criterion_count();

} // namespace bmc::verify

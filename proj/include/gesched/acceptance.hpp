#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gesched::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Report {
    std::vector<CriterionResult> criteria;
    bool all_pass = true;
    uint64_t seed = 0;
    std::string text() const; // one line per criterion, byte-stable
};

// Runs the acceptance criteria (all when `only` is empty). Deterministic for
// a fixed seed.
Report run(uint64_t seed, const std::vector<int>& only = {});

} // namespace gesched::acceptance

#pragma once
// Built-in consistency suite: oracle equivalence, root invariance, exact
// edge-evaluation counts, and normalization checks at library tolerances.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sgs {

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_err = 0.0; // worst relative error, or count mismatch
};

std::vector<CheckResult> run_selftest(const std::vector<std::pair<int, int>>& sizes,
                                      std::uint64_t seed);

std::vector<std::pair<int, int>> default_selftest_sizes();

} // namespace sgs

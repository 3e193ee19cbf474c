#pragma once
// Scaling benchmark: wall time of the fast path and the brute-force oracle
// over square maps, with log-log slope fits.

#include <cstdint>
#include <string>
#include <vector>

namespace sgs {

struct BenchPoint {
    int side = 0;
    double fast_seconds = 0.0;
    double oracle_seconds = 0.0; // 0 when the oracle was skipped at this size
    std::uint64_t edge_evals = 0;
};

struct SlopeFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

struct BenchReport {
    std::vector<BenchPoint> points;
    SlopeFit fast_fit;   // log(time) vs log(N), N = side^2
    SlopeFit oracle_fit;
};

struct BenchConfig {
    int min_side = 32;
    int max_side = 512;
    int num_points = 7;
    int oracle_max_side = 128;
    bool parallel = false;
    std::uint64_t seed = 1;
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

BenchReport run_bench(const BenchConfig& cfg);

std::string format_report(const BenchReport& report);

} // namespace sgs

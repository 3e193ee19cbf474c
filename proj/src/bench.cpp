#include "sgs/bench.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "sgs/fastpath.hpp"
#include "sgs/oracle.hpp"
#include "sgs/tensor.hpp"

namespace sgs {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_seconds(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Minimum over repeated single calls. Shared machines insert stalls of
// hundreds of milliseconds; the minimum is the only estimator that
// survives them, and single calls here are long enough to time directly.
double time_call(const std::function<void()>& fn) {
    fn(); // warmup
    double best = 1e300;
    auto start = clock_type::now();
    int calls = 0;
    while (calls < 7 || (elapsed_seconds(start) < 0.4 && calls < 200)) {
        auto t0 = clock_type::now();
        fn();
        best = std::min(best, elapsed_seconds(t0));
        ++calls;
    }
    return best;
}

} // namespace

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_loglog: need at least two matching points");
    }
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    double denom = n * sxx - sx * sx;
    SlopeFit fit;
    fit.points = static_cast<int>(n);
    fit.slope = (n * sxy - sx * sy) / denom;
    double ss_tot = syy - sy * sy / n;
    double intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = fit.slope * std::log(x[i]) + intercept;
        double res = std::log(y[i]) - pred;
        ss_res += res * res;
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

BenchReport run_bench(const BenchConfig& cfg) {
    if (cfg.num_points < 4) throw std::invalid_argument("bench: need at least 4 points");
    if (cfg.min_side < 2 || cfg.max_side <= cfg.min_side) {
        throw std::invalid_argument("bench: bad size range");
    }

    // geometric spacing, deduplicated after rounding
    std::vector<int> sides;
    double ratio = std::pow(static_cast<double>(cfg.max_side) / cfg.min_side,
                            1.0 / (cfg.num_points - 1));
    for (int i = 0; i < cfg.num_points; ++i) {
        int s = static_cast<int>(std::lround(cfg.min_side * std::pow(ratio, i)));
        if (sides.empty() || s > sides.back()) sides.push_back(s);
    }

    BenchReport report;
    const Scale scale{1.1, 0.9};
    FilterOptions opts;
    opts.parallel = cfg.parallel;

    std::vector<double> fast_n, fast_t, oracle_n, oracle_t;
    for (int side : sides) {
        Tensor3 guide = random_tensor(2, side, side, cfg.seed);
        Tensor3 values = random_tensor(4, side, side, cfg.seed + 1);

        BenchPoint pt;
        pt.side = side;
        EvalCounter counter;
        semi_global_filter(guide, values, scale, &counter, opts);
        pt.edge_evals = counter.count();

        pt.fast_seconds = time_call([&] {
            semi_global_filter(guide, values, scale, nullptr, opts);
        });
        fast_n.push_back(static_cast<double>(side) * side);
        fast_t.push_back(pt.fast_seconds);

        if (side <= cfg.oracle_max_side) {
            pt.oracle_seconds = time_call([&] {
                crisscross_oracle(guide, values, scale);
            });
            oracle_n.push_back(static_cast<double>(side) * side);
            oracle_t.push_back(pt.oracle_seconds);
        }
        report.points.push_back(pt);
    }

    report.fast_fit = fit_loglog(fast_n, fast_t);
    if (oracle_n.size() >= 2) report.oracle_fit = fit_loglog(oracle_n, oracle_t);
    return report;
}

std::string format_report(const BenchReport& report) {
    std::ostringstream os;
    os << "side\tN\tfast_s\toracle_s\tedge_evals\tanalytic\n";
    for (const BenchPoint& p : report.points) {
        std::uint64_t analytic = 4ull * p.side * p.side - 4ull * p.side;
        os << p.side << "\t" << static_cast<long long>(p.side) * p.side << "\t"
           << p.fast_seconds << "\t";
        if (p.oracle_seconds > 0)
            os << p.oracle_seconds;
        else
            os << "-";
        os << "\t" << p.edge_evals << "\t" << analytic << "\n";
    }
    os << "\nfast path : slope " << report.fast_fit.slope << "  R^2 "
       << report.fast_fit.r_squared << "  (" << report.fast_fit.points << " points)\n";
    if (report.oracle_fit.points > 0) {
        os << "oracle    : slope " << report.oracle_fit.slope << "  R^2 "
           << report.oracle_fit.r_squared << "  (" << report.oracle_fit.points
           << " points)\n";
    }
    return os.str();
}

} // namespace sgs

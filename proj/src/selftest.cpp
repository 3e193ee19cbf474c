#include "sgs/selftest.hpp"

#include <algorithm>
#include <cmath>

#include "sgs/fastpath.hpp"
#include "sgs/oracle.hpp"
#include "sgs/tensor.hpp"

namespace sgs {

namespace {

double max_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double den = std::max({std::abs(a[i]), std::abs(b[i]), 1e-30});
        worst = std::max(worst, std::abs(a[i] - b[i]) / den);
    }
    return worst;
}

} // namespace

std::vector<std::pair<int, int>> default_selftest_sizes() {
    return {{1, 1}, {1, 5}, {4, 4}, {3, 7}, {8, 8}, {13, 5}, {16, 16}};
}

std::vector<CheckResult> run_selftest(const std::vector<std::pair<int, int>>& sizes,
                                      std::uint64_t seed) {
    std::vector<CheckResult> results;
    const Scale scale{0.9, 1.3};

    double worst_oracle = 0.0, worst_root = 0.0, worst_norm = 0.0;
    double count_mismatch = 0.0;
    std::uint64_t instance = 0;

    for (auto [h, w] : sizes) {
        Tensor3 guide = random_tensor(2, h, w, seed + 17 * instance);
        Tensor3 values = random_tensor(3, h, w, seed + 17 * instance + 1);
        ++instance;

        EvalCounter counter;
        Tensor3 fast = semi_global_filter(guide, values, scale, &counter);
        Tensor3 ref = crisscross_oracle(guide, values, scale);
        worst_oracle = std::max(worst_oracle, max_rel_err(fast.values, ref.values));

        std::uint64_t expected = 4ull * w * h - 2ull * (w + h);
        if (counter.count() != expected) {
            count_mismatch = std::max(
                count_mismatch, std::abs(static_cast<double>(counter.count()) -
                                         static_cast<double>(expected)));
        }

        // root invariance along the first row
        Matrix g(w, guide.C), v(w, values.C);
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < guide.C; ++c) g.at(x, c) = guide.at(c, 0, x);
            for (int c = 0; c < values.C; ++c) v.at(x, c) = values.at(c, 0, x);
        }
        Matrix base = chain_filter_fast(g, v, scale.alpha, 0);
        for (int root = 1; root < w; ++root) {
            Matrix other = chain_filter_fast(g, v, scale.alpha, root);
            worst_root = std::max(worst_root, max_rel_err(base.v, other.v));
        }

        Tensor3 norm_fast = normalizer(guide, scale);
        Tensor3 norm_ref = normalizer_oracle(guide, scale);
        worst_norm = std::max(worst_norm, max_rel_err(norm_fast.values, norm_ref.values));

        // normalized mode on constant values returns the constant
        Tensor3 const_vals = make_tensor(1, h, w, 2.5);
        Tensor3 agg = semi_global_filter(guide, const_vals, scale);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double got = agg.at(0, y, x) / norm_fast.at(0, y, x);
                worst_norm = std::max(worst_norm, std::abs(got - 2.5) / 2.5);
            }
        }
    }

    results.push_back({"oracle-equivalence", worst_oracle <= 1e-10, worst_oracle});
    results.push_back({"root-invariance", worst_root <= 1e-10, worst_root});
    results.push_back({"count-exactness", count_mismatch == 0.0, count_mismatch});
    results.push_back({"normalization", worst_norm <= 1e-10, worst_norm});
    return results;
}

} // namespace sgs

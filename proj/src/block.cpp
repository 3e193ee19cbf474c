#include "sgs/block.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgs/kernels.hpp"

namespace sgs {

namespace {

std::uint64_t mix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void fill_uniform(Matrix& m, double half_width, std::uint64_t& state) {
    for (double& v : m.v) {
        double u = static_cast<double>(mix64(state) >> 11) * 0x1.0p-53;
        v = (2.0 * u - 1.0) * half_width;
    }
}

// Divide every channel of the aggregation branch by the per-position S map.
void divide_by_map(Tensor3& t, const Tensor3& s) {
    for (int c = 0; c < t.C; ++c)
        for (int y = 0; y < t.H; ++y)
            for (int x = 0; x < t.W; ++x) t.at(c, y, x) /= s.at(0, y, x);
}

const BlockParams& level_params(const HierarchyConfig& cfg,
                                const std::vector<BlockParams>& params,
                                int level) {
    if (cfg.levels < 1) throw std::invalid_argument("hierarchy: levels must be >= 1");
    std::size_t expected = cfg.shared ? 1 : static_cast<std::size_t>(cfg.levels);
    if (params.size() != expected) {
        throw std::invalid_argument("hierarchy: parameter count mismatch");
    }
    return params[cfg.shared ? 0 : static_cast<std::size_t>(level)];
}

} // namespace

int default_reduced_channels(int C) { return std::max(1, C / 8); }

BlockParams random_block_params(int C, int reduced, std::uint64_t seed) {
    if (C < 1 || reduced < 1) throw std::invalid_argument("block params: channels must be >= 1");
    BlockParams p;
    p.lambda_matrix = Matrix(reduced, C);
    p.psi_matrix = Matrix(C, C);
    std::uint64_t state = seed * 0x9e3779b97f4a7c15ULL + 0x1234abcd5678ef01ULL;
    double half_width = 1.0 / std::sqrt(static_cast<double>(C));
    fill_uniform(p.lambda_matrix, half_width, state);
    fill_uniform(p.psi_matrix, half_width, state);
    return p;
}

BlockParams identity_block_params(int C) {
    BlockParams p;
    p.lambda_matrix = Matrix(C, C);
    p.psi_matrix = Matrix(C, C);
    for (int i = 0; i < C; ++i) {
        p.lambda_matrix.at(i, i) = 1.0;
        p.psi_matrix.at(i, i) = 1.0;
    }
    return p;
}

Tensor3 pointwise_transform(const Tensor3& x, const Matrix& M) {
    if (M.cols != static_cast<std::size_t>(x.C) || M.rows == 0) {
        throw std::invalid_argument("pointwise_transform: matrix/channel mismatch");
    }
    Tensor3 out(static_cast<int>(M.rows), x.H, x.W);
    const std::size_t plane = static_cast<std::size_t>(x.H) * x.W;
    for (std::size_t r = 0; r < M.rows; ++r) {
        double* dst = out.values.data() + r * plane;
        for (std::size_t c = 0; c < M.cols; ++c) {
            kernels::active().axpy(dst, x.values.data() + c * plane, M.at(r, c), plane);
        }
    }
    return out;
}

Tensor3 semi_global_block(const Tensor3& input, const BlockParams& p,
                          EvalCounter* counter, const FilterOptions& opts) {
    Tensor3 guide = pointwise_transform(input, p.lambda_matrix);
    Tensor3 values = pointwise_transform(input, p.psi_matrix);
    Tensor3 agg = semi_global_filter(guide, values, p.scale, counter, opts);
    if (p.normalized) divide_by_map(agg, normalizer(guide, p.scale, opts));
    kernels::active().add(agg.values.data(), input.values.data(), agg.size());
    return agg;
}

Tensor3 hierarchical_apply(const Tensor3& input, const HierarchyConfig& cfg,
                           const std::vector<BlockParams>& params,
                           EvalCounter* counter, const FilterOptions& opts) {
    Tensor3 cur = input;
    for (int level = 0; level < cfg.levels; ++level) {
        cur = semi_global_block(cur, level_params(cfg, params, level), counter, opts);
    }
    return cur;
}

AttentionSlice attention_slice(const Tensor3& input, const BlockParams& p,
                               Position u) {
    Tensor3 guide = pointwise_transform(input, p.lambda_matrix);
    return attention_slice_oracle(guide, u, p.scale);
}

Matrix attention_slice_as_map(const AttentionSlice& slice, int H, int W) {
    if (slice.weights.size() != static_cast<std::size_t>(H) + W - 1) {
        throw std::invalid_argument("attention slice length does not match H+W-1");
    }
    Matrix map(H, W);
    std::size_t i = 0;
    for (int y = 0; y < H; ++y) map.at(y, slice.center.x) = slice.weights[i++];
    for (int x = 0; x < W; ++x) {
        if (x == slice.center.x) continue;
        map.at(slice.center.y, x) = slice.weights[i++];
    }
    return map;
}

Matrix effective_attention(const Tensor3& input, const HierarchyConfig& cfg,
                           const std::vector<BlockParams>& params, Position u,
                           double epsilon) {
    if (!input.in_bounds(u)) throw std::out_of_range("effective_attention: position out of bounds");
    if (!(epsilon > 0.0)) throw std::invalid_argument("effective_attention: epsilon must be > 0");

    // Freeze each level's guide at its unperturbed value.
    std::vector<Tensor3> guides;
    guides.reserve(static_cast<std::size_t>(cfg.levels));
    {
        Tensor3 cur = input;
        for (int level = 0; level < cfg.levels; ++level) {
            const BlockParams& p = level_params(cfg, params, level);
            guides.push_back(pointwise_transform(cur, p.lambda_matrix));
            cur = semi_global_block(cur, p);
        }
    }

    auto run_fixed_guides = [&](const Tensor3& start) {
        Tensor3 cur = start;
        for (int level = 0; level < cfg.levels; ++level) {
            const BlockParams& p = level_params(cfg, params, level);
            Tensor3 values = pointwise_transform(cur, p.psi_matrix);
            Tensor3 agg = semi_global_filter(guides[level], values, p.scale);
            if (p.normalized) divide_by_map(agg, normalizer(guides[level], p.scale));
            kernels::active().add(agg.values.data(), cur.values.data(), agg.size());
            cur = agg;
        }
        return cur;
    };

    Tensor3 base = run_fixed_guides(input);
    Matrix map(input.H, input.W);
    for (int y = 0; y < input.H; ++y) {
        for (int x = 0; x < input.W; ++x) {
            Tensor3 pert = input;
            for (int c = 0; c < input.C; ++c) pert.at(c, y, x) += epsilon;
            Tensor3 out = run_fixed_guides(pert);
            double l1 = 0.0;
            for (int c = 0; c < input.C; ++c) {
                l1 += std::abs(out.at(c, u.y, u.x) - base.at(c, u.y, u.x));
            }
            map.at(y, x) = l1 / (epsilon * input.C);
        }
    }
    return map;
}

} // namespace sgs

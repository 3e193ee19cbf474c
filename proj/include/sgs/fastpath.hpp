#pragma once
// Linear-time two-pass chain filtering: leaf-to-root aggregation, root-to-leaf
// update, and the criss-cross combination over all rows and columns.

#include <atomic>
#include <cstdint>
#include <vector>

#include "sgs/tensor.hpp"
#include "sgs/weights.hpp"

namespace sgs {

// One row or column as a rooted chain. Node i's parent is i+1 left of the
// root, i-1 right of it.
struct ChainTree {
    std::size_t length = 0;
    std::size_t root = 0;
};

// One weighted multiply-accumulate across a tree edge = one evaluation.
struct EvalCounter {
    std::atomic<std::uint64_t> edge_evals{0};

    void reset() { edge_evals.store(0, std::memory_order_relaxed); }
    std::uint64_t count() const { return edge_evals.load(std::memory_order_relaxed); }
    void bump(std::uint64_t n) { edge_evals.fetch_add(n, std::memory_order_relaxed); }
};

struct FilterOptions {
    bool parallel = false;
};

ChainTree build_chain(std::size_t length, std::size_t root);

// Edge distances d[i] = ||guide_i - guide_{i+1}|| along one chain.
std::vector<double> chain_edge_distances(const Matrix& guide);

// w[i] = exp(-d[i] / scale).
std::vector<double> chain_edge_weights(const std::vector<double>& distances,
                                       double scale);

// A(I_u): leaves keep their value, inner nodes add the weighted child sums.
Matrix aggregate_pass(const ChainTree& tree, const std::vector<double>& w,
                      const Matrix& values, EvalCounter* counter = nullptr);

// U(I_u) from A: the root keeps A, every other node mixes its parent's U
// with its own A through the (1 - w^2) correction.
Matrix update_pass(const ChainTree& tree, const std::vector<double>& w,
                   const Matrix& A, EvalCounter* counter = nullptr);

// Full chain filter: weights from the guide, then both passes. Output is
// root-invariant.
Matrix chain_filter_fast(const Matrix& guide, const Matrix& values,
                         double scale, std::size_t root,
                         EvalCounter* counter = nullptr);

// Row trees (scale.alpha) plus column trees (scale.beta), summed per
// position, no residual. edge_evals grows by exactly 4WH - 2(W+H).
Tensor3 semi_global_filter(const Tensor3& guide, const Tensor3& values,
                           Scale scale, EvalCounter* counter = nullptr,
                           const FilterOptions& opts = {});

// S_u: the same filter applied to an all-ones single channel.
Tensor3 normalizer(const Tensor3& guide, Scale scale,
                   const FilterOptions& opts = {});

// Default root used by the tensor-level filters.
inline std::size_t default_root(std::size_t length) { return length / 2; }

// Test hook: corrupt one edge weight in the next filter calls so that the
// self-test suite can prove its own sensitivity.
void set_fault_injection(bool enabled);
bool fault_injection_enabled();

} // namespace sgs

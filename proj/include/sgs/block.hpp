#pragma once
// The semi-global block: channel-reducing guide transform, value transform,
// criss-cross filtering, residual, optional normalization, and hierarchical
// stacking. Attention extraction for visualization lives here too.

#include <cstdint>
#include <vector>

#include "sgs/fastpath.hpp"
#include "sgs/oracle.hpp"
#include "sgs/tensor.hpp"
#include "sgs/weights.hpp"

namespace sgs {

// Learnable state of one block. lambda reduces C to C' for the guide,
// psi maps C to C for the values; both are bias-free.
struct BlockParams {
    Matrix lambda_matrix; // C' x C
    Matrix psi_matrix;    // C x C
    Scale scale;
    bool normalized = false;
};

struct HierarchyConfig {
    int levels = 1;
    bool shared = true;
};

// Default guide width: one eighth of C, at least 1.
int default_reduced_channels(int C);

// alpha = beta = 1, matrices uniform [-1,1]/sqrt(C).
BlockParams random_block_params(int C, int reduced, std::uint64_t seed);
BlockParams identity_block_params(int C);

// out_vector(pos) = M * in_vector(pos) at every position.
Tensor3 pointwise_transform(const Tensor3& x, const Matrix& M);

// Lambda = lambda(I); Psi = psi(I); G = filter(Lambda, Psi);
// result = G + I, or G / S + I in normalized mode.
Tensor3 semi_global_block(const Tensor3& input, const BlockParams& p,
                          EvalCounter* counter = nullptr,
                          const FilterOptions& opts = {});

// Sequential block applications. params holds one entry when cfg.shared,
// otherwise cfg.levels entries.
Tensor3 hierarchical_apply(const Tensor3& input, const HierarchyConfig& cfg,
                           const std::vector<BlockParams>& params,
                           EvalCounter* counter = nullptr,
                           const FilterOptions& opts = {});

// Criss-cross weights of one position computed on this block's guide.
AttentionSlice attention_slice(const Tensor3& input, const BlockParams& p,
                               Position u);

// Influence of every input position on the output at u after cfg.levels
// blocks: L1 output change per unit of value-pathway perturbation, with the
// guide held at each level's unperturbed Lambda.
Matrix effective_attention(const Tensor3& input, const HierarchyConfig& cfg,
                           const std::vector<BlockParams>& params, Position u,
                           double epsilon);

// Embed an attention slice into an H x W map (zeros off the cross).
Matrix attention_slice_as_map(const AttentionSlice& slice, int H, int W);

} // namespace sgs

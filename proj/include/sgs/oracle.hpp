#pragma once
// Brute-force reference implementations of the criss-cross aggregation.
// Quadratic per chain, trusted ground truth for the two-pass fast path.

#include "sgs/tensor.hpp"
#include "sgs/weights.hpp"

namespace sgs {

// Attention weights of one position over its cross, in gather_cross order.
struct AttentionSlice {
    Position center;
    std::vector<double> weights; // length H + W - 1
};

// out_u = sum_v Omega(u,v) * values_v over one chain; Omega is exp of the
// accumulated guide distance strictly between u and v, divided by scale.
Matrix chain_filter_bruteforce(const Matrix& guide, const Matrix& values,
                               double scale);

// Row tree + column tree per position, no residual. The center value is
// counted twice (once per tree).
Tensor3 crisscross_oracle(const Tensor3& guide, const Tensor3& values,
                          Scale scale);

AttentionSlice attention_slice_oracle(const Tensor3& guide, Position u,
                                      Scale scale);

// crisscross_oracle divided per position by S_u = sum of both trees' weights.
Tensor3 normalized_aggregate_oracle(const Tensor3& guide, const Tensor3& values,
                                    Scale scale);

// Denominator S_u alone, as a 1-channel map.
Tensor3 normalizer_oracle(const Tensor3& guide, Scale scale);

} // namespace sgs

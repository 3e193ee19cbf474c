#pragma once
// Reverse-mode gradients of the chain filter and the full block, plus the
// central finite-difference verification harness.

#include <cstdint>
#include <vector>

#include "sgs/block.hpp"
#include "sgs/fastpath.hpp"
#include "sgs/tensor.hpp"

namespace sgs {

struct GradBundle {
    Tensor3 d_input;
    double d_alpha = 0.0;
    double d_beta = 0.0;
    Matrix d_lambda;
    Matrix d_psi;
};

// Saved intermediates of one recorded chain filter call.
struct ChainRecord {
    ChainTree tree;
    double scale = 1.0;
    std::vector<double> distances; // L-1
    std::vector<double> weights;   // L-1
    Matrix aggregated;             // A, L x C
    Matrix updated;                // U, L x C (the forward output)
};

struct ChainGrads {
    Matrix d_guide;  // L x C'
    Matrix d_values; // L x C
    double d_scale = 0.0;
};

ChainRecord chain_forward_record(const Matrix& guide, const Matrix& values,
                                 double scale, std::size_t root,
                                 EvalCounter* counter = nullptr);

// Gradients of sum(upstream * output) through both recursions, the edge
// weights, and the guide distances.
ChainGrads backward_chain_filter(const Matrix& guide, const Matrix& values,
                                 const ChainRecord& rec, const Matrix& upstream);

// One recorded semi_global_block forward; single-owner, one backward per
// forward.
class BlockTape {
  public:
    Tensor3 forward(const Tensor3& input, const BlockParams& params,
                    EvalCounter* counter = nullptr);
    GradBundle backward(const Tensor3& upstream) const;

  private:
    bool recorded_ = false;
    Tensor3 input_;
    BlockParams params_;
    Tensor3 guide_;      // Lambda
    Tensor3 aggregated_; // G before normalization/residual
    Tensor3 norm_;       // S (normalized mode only)
    std::vector<ChainRecord> row_records_, col_records_;
    std::vector<ChainRecord> row_ones_records_, col_ones_records_;
};

// Max relative error between analytic and central-difference gradients on a
// probe loss sum(R * block(input)), R drawn from probe_seed.
enum class FdComponent { Input, Alpha, Beta, Lambda, Psi, All };

double finite_diff_check_block(const Tensor3& input, const BlockParams& params,
                               FdComponent component, double h,
                               std::uint64_t probe_seed = 1234);

// Same harness for the bias-free linear map alone; exact up to rounding.
double finite_diff_check_transform(const Tensor3& input, const Matrix& M,
                                   double h, std::uint64_t probe_seed = 1234);

} // namespace sgs

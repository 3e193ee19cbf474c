#include "sgs/oracle.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

namespace sgs {

namespace {

std::span<const double> row_span(const Matrix& m, std::size_t r) {
    return {m.row(r), m.cols};
}

// Extract one spatial row (y fixed) or column (x fixed) as an L x C matrix.
Matrix slice_row(const Tensor3& t, int y) {
    Matrix m(t.W, t.C);
    for (int x = 0; x < t.W; ++x)
        for (int c = 0; c < t.C; ++c) m.at(x, c) = t.at(c, y, x);
    return m;
}

Matrix slice_col(const Tensor3& t, int x) {
    Matrix m(t.H, t.C);
    for (int y = 0; y < t.H; ++y)
        for (int c = 0; c < t.C; ++c) m.at(y, c) = t.at(c, y, x);
    return m;
}

void check_same_spatial(const Tensor3& guide, const Tensor3& values) {
    if (guide.H != values.H || guide.W != values.W) {
        throw std::invalid_argument("guide and values must share H and W");
    }
}

} // namespace

Matrix chain_filter_bruteforce(const Matrix& guide, const Matrix& values,
                               double scale) {
    if (guide.rows != values.rows || guide.rows == 0) {
        throw std::invalid_argument("chain_filter_bruteforce: length mismatch");
    }
    const std::size_t L = values.rows;
    const std::size_t C = values.cols;
    Matrix out(L, C);
    for (std::size_t u = 0; u < L; ++u) {
        for (std::size_t c = 0; c < C; ++c) out.at(u, c) = values.at(u, c);
        // walk left of u, accumulating the path distance explicitly
        double dist = 0.0;
        for (std::size_t v = u; v-- > 0;) {
            dist += euclid_distance(row_span(guide, v), row_span(guide, v + 1));
            double w = std::exp(-dist / scale);
            for (std::size_t c = 0; c < C; ++c) out.at(u, c) += w * values.at(v, c);
        }
        // walk right of u
        dist = 0.0;
        for (std::size_t v = u + 1; v < L; ++v) {
            dist += euclid_distance(row_span(guide, v - 1), row_span(guide, v));
            double w = std::exp(-dist / scale);
            for (std::size_t c = 0; c < C; ++c) out.at(u, c) += w * values.at(v, c);
        }
    }
    return out;
}

Tensor3 crisscross_oracle(const Tensor3& guide, const Tensor3& values,
                          Scale scale) {
    check_same_spatial(guide, values);
    Tensor3 out(values.C, values.H, values.W);
    for (int y = 0; y < values.H; ++y) {
        Matrix g = slice_row(guide, y);
        Matrix v = slice_row(values, y);
        Matrix f = chain_filter_bruteforce(g, v, scale.alpha);
        for (int x = 0; x < values.W; ++x)
            for (int c = 0; c < values.C; ++c) out.at(c, y, x) += f.at(x, c);
    }
    for (int x = 0; x < values.W; ++x) {
        Matrix g = slice_col(guide, x);
        Matrix v = slice_col(values, x);
        Matrix f = chain_filter_bruteforce(g, v, scale.beta);
        for (int y = 0; y < values.H; ++y)
            for (int c = 0; c < values.C; ++c) out.at(c, y, x) += f.at(y, c);
    }
    return out;
}

AttentionSlice attention_slice_oracle(const Tensor3& guide, Position u,
                                      Scale scale) {
    if (!guide.in_bounds(u)) {
        throw std::out_of_range("attention_slice_oracle: position out of bounds");
    }
    AttentionSlice slice;
    slice.center = u;
    slice.weights.reserve(static_cast<std::size_t>(guide.H) + guide.W - 1);
    Matrix col = slice_col(guide, u.x);
    for (int y = 0; y < guide.H; ++y) {
        int lo = std::min(y, u.y), hi = std::max(y, u.y);
        double dist = 0.0;
        for (int i = lo; i < hi; ++i)
            dist += euclid_distance(row_span(col, i), row_span(col, i + 1));
        slice.weights.push_back(std::exp(-dist / scale.beta));
    }
    Matrix row = slice_row(guide, u.y);
    for (int x = 0; x < guide.W; ++x) {
        if (x == u.x) continue;
        int lo = std::min(x, u.x), hi = std::max(x, u.x);
        double dist = 0.0;
        for (int i = lo; i < hi; ++i)
            dist += euclid_distance(row_span(row, i), row_span(row, i + 1));
        slice.weights.push_back(std::exp(-dist / scale.alpha));
    }
    return slice;
}

Tensor3 normalizer_oracle(const Tensor3& guide, Scale scale) {
    Tensor3 ones = make_tensor(1, guide.H, guide.W, 1.0);
    return crisscross_oracle(guide, ones, scale);
}

Tensor3 normalized_aggregate_oracle(const Tensor3& guide, const Tensor3& values,
                                    Scale scale) {
    check_same_spatial(guide, values);
    Tensor3 num = crisscross_oracle(guide, values, scale);
    Tensor3 den = normalizer_oracle(guide, scale);
    for (int c = 0; c < num.C; ++c)
        for (int y = 0; y < num.H; ++y)
            for (int x = 0; x < num.W; ++x)
                num.at(c, y, x) /= den.at(0, y, x);
    return num;
}

} // namespace sgs

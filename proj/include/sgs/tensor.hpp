#pragma once
// Dense 3-D tensor (channel-major), positions, and deterministic random fill.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sgs {

struct Position {
    int x = 0;
    int y = 0;
};

// L x C row-major matrix used for chain slices and gathered cross regions.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), v(r * c, fill) {}

    double* row(std::size_t r) { return v.data() + r * cols; }
    const double* row(std::size_t r) const { return v.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

// Feature map with layout (C, H, W): index = c*H*W + y*W + x.
struct Tensor3 {
    int C = 0;
    int H = 0;
    int W = 0;
    std::vector<double> values;

    Tensor3() = default;
    Tensor3(int c, int h, int w);

    std::size_t size() const { return values.size(); }
    std::size_t index(int c, int y, int x) const {
        return static_cast<std::size_t>(c) * H * W +
               static_cast<std::size_t>(y) * W + x;
    }
    double& at(int c, int y, int x) { return values[index(c, y, x)]; }
    double at(int c, int y, int x) const { return values[index(c, y, x)]; }

    bool in_bounds(Position u) const {
        return u.x >= 0 && u.x < W && u.y >= 0 && u.y < H;
    }
};

Tensor3 make_tensor(int C, int H, int W, double fill);

// Uniform in [-1, 1], bit-reproducible for a fixed seed across platforms.
Tensor3 random_tensor(int C, int H, int W, std::uint64_t seed);

// Rows: u's full column top-to-bottom, then u's row left-to-right without u.
// Always H + W - 1 rows of C columns.
Matrix gather_cross(const Tensor3& t, Position u);

} // namespace sgs

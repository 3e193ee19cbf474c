#include "sgs/tensor.hpp"

#include <stdexcept>
#include <string>

namespace sgs {

namespace {

void check_dims(int C, int H, int W) {
    if (C < 1 || H < 1 || W < 1) {
        throw std::invalid_argument("Tensor3 dimensions must be >= 1, got (" +
                                    std::to_string(C) + "," + std::to_string(H) +
                                    "," + std::to_string(W) + ")");
    }
}

// splitmix64: stable across platforms, unlike uniform_real_distribution.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Tensor3::Tensor3(int c, int h, int w) : C(c), H(h), W(w) {
    check_dims(c, h, w);
    values.assign(static_cast<std::size_t>(c) * h * w, 0.0);
}

Tensor3 make_tensor(int C, int H, int W, double fill) {
    Tensor3 t(C, H, W);
    for (double& v : t.values) v = fill;
    return t;
}

Tensor3 random_tensor(int C, int H, int W, std::uint64_t seed) {
    Tensor3 t(C, H, W);
    std::uint64_t state = seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
    for (double& v : t.values) {
        // 53 random bits -> [0,1), mapped to [-1,1)
        double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        v = 2.0 * u - 1.0;
    }
    return t;
}

Matrix gather_cross(const Tensor3& t, Position u) {
    if (!t.in_bounds(u)) {
        throw std::out_of_range("gather_cross: position (" + std::to_string(u.x) +
                                "," + std::to_string(u.y) + ") out of bounds");
    }
    Matrix m(static_cast<std::size_t>(t.H) + t.W - 1, t.C);
    std::size_t r = 0;
    for (int y = 0; y < t.H; ++y, ++r) {
        for (int c = 0; c < t.C; ++c) m.at(r, c) = t.at(c, y, u.x);
    }
    for (int x = 0; x < t.W; ++x) {
        if (x == u.x) continue;
        for (int c = 0; c < t.C; ++c) m.at(r, c) = t.at(c, u.y, x);
        ++r;
    }
    return m;
}

} // namespace sgs

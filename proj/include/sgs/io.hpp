#pragma once
// Tensor file format ("SGST", little-endian) and binary PGM export.

#include <stdexcept>
#include <string>

#include "sgs/tensor.hpp"

namespace sgs {

enum class Dtype : std::uint32_t { Float64 = 1, Float32 = 2 };

// Malformed header or payload; offset points at the failing byte.
struct FormatError : std::runtime_error {
    std::size_t offset;
    FormatError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " (byte offset " + std::to_string(off) + ")"),
          offset(off) {}
};

void save_tensor(const std::string& path, const Tensor3& t,
                 Dtype dtype = Dtype::Float64);
Tensor3 load_tensor(const std::string& path);

// 8-bit binary PGM (P5), min-max normalized; a constant map writes zeros.
void export_pgm(const Matrix& map, const std::string& path);

} // namespace sgs

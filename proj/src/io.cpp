#include "sgs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace sgs {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& buf, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::string& buf, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

void put_bytes_le(std::string& buf, std::uint64_t bits, int nbytes) {
    for (int i = 0; i < nbytes; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

} // namespace

void save_tensor(const std::string& path, const Tensor3& t, Dtype dtype) {
    std::string buf;
    buf.reserve(28 + t.size() * (dtype == Dtype::Float64 ? 8 : 4));
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(dtype));
    put_u32(buf, static_cast<std::uint32_t>(t.C));
    put_u32(buf, static_cast<std::uint32_t>(t.H));
    put_u32(buf, static_cast<std::uint32_t>(t.W));
    for (double v : t.values) {
        if (dtype == Dtype::Float64) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            put_bytes_le(buf, bits, 8);
        } else {
            float f = static_cast<float>(v);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_bytes_le(buf, bits, 4);
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_tensor: cannot open " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("save_tensor: write failed for " + path);
}

Tensor3 load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_tensor: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

    if (buf.size() < 24) throw FormatError("truncated header", buf.size());
    if (std::memcmp(buf.data(), kMagic, 4) != 0) throw FormatError("bad magic", 0);
    if (get_u32(buf, 4) != kVersion) throw FormatError("unsupported version", 4);
    std::uint32_t dtype = get_u32(buf, 8);
    if (dtype != 1 && dtype != 2) throw FormatError("unknown dtype code", 8);
    std::uint32_t C = get_u32(buf, 12), H = get_u32(buf, 16), W = get_u32(buf, 20);
    if (C == 0 || H == 0 || W == 0) throw FormatError("zero dimension", 12);

    std::size_t count = static_cast<std::size_t>(C) * H * W;
    std::size_t elem = dtype == 1 ? 8 : 4;
    if (buf.size() != 24 + count * elem) {
        throw FormatError("payload size mismatch", std::min(buf.size(), 24 + count * elem));
    }
    Tensor3 t(static_cast<int>(C), static_cast<int>(H), static_cast<int>(W));
    for (std::size_t i = 0; i < count; ++i) {
        if (dtype == 1) {
            std::uint64_t bits = get_u64(buf, 24 + i * 8);
            double v;
            std::memcpy(&v, &bits, 8);
            t.values[i] = v;
        } else {
            std::uint32_t bits = get_u32(buf, 24 + i * 4);
            float f;
            std::memcpy(&f, &bits, 4);
            t.values[i] = static_cast<double>(f);
        }
        if (!std::isfinite(t.values[i])) {
            throw FormatError("non-finite payload value", 24 + i * elem);
        }
    }
    return t;
}

void export_pgm(const Matrix& map, const std::string& path) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : map.v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span = hi - lo;
    std::string header = "P5\n" + std::to_string(map.cols) + " " +
                         std::to_string(map.rows) + "\n255\n";
    std::vector<unsigned char> pixels(map.v.size(), 0);
    if (span > 0.0) {
        for (std::size_t i = 0; i < map.v.size(); ++i) {
            pixels[i] = static_cast<unsigned char>(
                std::lround((map.v[i] - lo) / span * 255.0));
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("export_pgm: cannot open " + path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw std::runtime_error("export_pgm: write failed for " + path);
}

} // namespace sgs

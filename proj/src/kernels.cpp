#include "sgs/kernels.hpp"

namespace sgs::kernels {

namespace scalar {

void weighted_add(double* dst, const double* a, const double* b, double w,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + w * b[i];
}

void lincomb(double* dst, const double* a, double wa, const double* b,
             double wb, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = wa * a[i] + wb * b[i];
}

void axpy(double* dst, const double* x, double w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += w * x[i];
}

void add(double* dst, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

} // namespace scalar

const Ops& scalar_ops() {
    static const Ops ops = {scalar::weighted_add, scalar::lincomb,
                            scalar::axpy,         scalar::add,
                            scalar::squared_distance, scalar::dot, "scalar"};
    return ops;
}

namespace {

const Ops& resolve() {
#if defined(SGS_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) {
        static const Ops ops = {avx2::weighted_add, avx2::lincomb,
                                avx2::axpy,         avx2::add,
                                avx2::squared_distance, avx2::dot, "avx2"};
        return ops;
    }
#endif
    return scalar_ops();
}

} // namespace

const Ops& active() {
    static const Ops& ops = resolve();
    return ops;
}

} // namespace sgs::kernels

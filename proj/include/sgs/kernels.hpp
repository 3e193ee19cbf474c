#pragma once
// Inner-loop kernels: scalar reference implementations plus SIMD variants
// selected once at startup from CPU capabilities.

#include <cstddef>

namespace sgs::kernels {

struct Ops {
    // dst[i] = a[i] + w * b[i]
    void (*weighted_add)(double* dst, const double* a, const double* b,
                         double w, std::size_t n);
    // dst[i] = wa * a[i] + wb * b[i]
    void (*lincomb)(double* dst, const double* a, double wa, const double* b,
                    double wb, std::size_t n);
    // dst[i] += w * x[i]
    void (*axpy)(double* dst, const double* x, double w, std::size_t n);
    // dst[i] += x[i]
    void (*add)(double* dst, const double* x, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    const char* name;
};

namespace scalar {
void weighted_add(double* dst, const double* a, const double* b, double w,
                  std::size_t n);
void lincomb(double* dst, const double* a, double wa, const double* b,
             double wb, std::size_t n);
void axpy(double* dst, const double* x, double w, std::size_t n);
void add(double* dst, const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
} // namespace scalar

#if defined(SGS_HAVE_AVX2)
namespace avx2 {
void weighted_add(double* dst, const double* a, const double* b, double w,
                  std::size_t n);
void lincomb(double* dst, const double* a, double wa, const double* b,
             double wb, std::size_t n);
void axpy(double* dst, const double* x, double w, std::size_t n);
void add(double* dst, const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
} // namespace avx2
#endif

const Ops& scalar_ops();

// Best variant for this CPU, resolved once.
const Ops& active();

} // namespace sgs::kernels

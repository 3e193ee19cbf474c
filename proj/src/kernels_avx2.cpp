// AVX2 variants. Elementwise kernels use mul+add (no FMA) so results are
// bit-identical with the scalar reference; reductions differ only in
// summation order.

#include "sgs/kernels.hpp"

#if defined(SGS_HAVE_AVX2)

#include <immintrin.h>

namespace sgs::kernels::avx2 {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

} // namespace

void weighted_add(double* dst, const double* a, const double* b, double w,
                  std::size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(dst + i, _mm256_add_pd(va, _mm256_mul_pd(vw, vb)));
    }
    for (; i < n; ++i) dst[i] = a[i] + w * b[i];
}

void lincomb(double* dst, const double* a, double wa, const double* b,
             double wb, std::size_t n) {
    const __m256d va_w = _mm256_set1_pd(wa);
    const __m256d vb_w = _mm256_set1_pd(wb);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_mul_pd(va_w, _mm256_loadu_pd(a + i));
        __m256d vb = _mm256_mul_pd(vb_w, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(va, vb));
    }
    for (; i < n; ++i) dst[i] = wa * a[i] + wb * b[i];
}

void axpy(double* dst, const double* x, double w, std::size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vd = _mm256_loadu_pd(dst + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(dst + i, _mm256_add_pd(vd, _mm256_mul_pd(vw, vx)));
    }
    for (; i < n; ++i) dst[i] += w * x[i];
}

void add(double* dst, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vd = _mm256_loadu_pd(dst + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(dst + i, _mm256_add_pd(vd, vx));
    }
    for (; i < n; ++i) dst[i] += x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(
            acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

} // namespace sgs::kernels::avx2

#endif // SGS_HAVE_AVX2

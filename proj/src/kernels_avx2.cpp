#include "dgc/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace dgc::kernels::detail {

namespace {

// (lane0 + lane1) + (lane2 + lane3); same association as the scalar kernels.
inline double reduce_lanes(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const double l0 = _mm_cvtsd_f64(lo);
    const double l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    const double l2 = _mm_cvtsd_f64(hi);
    const double l3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
    return (l0 + l1) + (l2 + l3);
}

}  // namespace

// No FMA: mul followed by add keeps the rounding identical to the scalar path.

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t blocks = n / 4;
    for (std::size_t i = 0; i < blocks; ++i) {
        const __m256d va = _mm256_loadu_pd(a + 4 * i);
        const __m256d vb = _mm256_loadu_pd(b + 4 * i);
        const __m256d d = _mm256_sub_pd(va, vb);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double sum = reduce_lanes(acc);
    for (std::size_t i = 4 * blocks; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double weighted_squared_distance_avx2(const double* a, const double* b, const double* w,
                                      std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t blocks = n / 4;
    for (std::size_t i = 0; i < blocks; ++i) {
        const __m256d va = _mm256_loadu_pd(a + 4 * i);
        const __m256d vb = _mm256_loadu_pd(b + 4 * i);
        const __m256d vw = _mm256_loadu_pd(w + 4 * i);
        const __m256d d = _mm256_sub_pd(va, vb);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(d, d), vw));
    }
    double sum = reduce_lanes(acc);
    for (std::size_t i = 4 * blocks; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += (d * d) * w[i];
    }
    return sum;
}

}  // namespace dgc::kernels::detail

#endif  // x86_64

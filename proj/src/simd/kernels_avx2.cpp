// AVX2+FMA variants. This TU is compiled with -mavx2 -mfma; callers must
// gate on runtime CPU detection (see dispatch.cpp).

#include "themis/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace themis::simd {

bool avx2_compiled() {
    return true;
}

double dot_avx2(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 af = _mm256_loadu_ps(a + i);
        __m256 bf = _mm256_loadu_ps(b + i);
        // widen each half to double before accumulating
        __m256d alo = _mm256_cvtps_pd(_mm256_castps256_ps128(af));
        __m256d ahi = _mm256_cvtps_pd(_mm256_extractf128_ps(af, 1));
        __m256d blo = _mm256_cvtps_pd(_mm256_castps256_ps128(bf));
        __m256d bhi = _mm256_cvtps_pd(_mm256_extractf128_ps(bf, 1));
        acc0 = _mm256_fmadd_pd(alo, blo, acc0);
        acc1 = _mm256_fmadd_pd(ahi, bhi, acc1);
    }
    __m256d acc = _mm256_add_pd(acc0, acc1);
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

void scale_avx2(float* v, std::size_t n, float s) {
    __m256 sv = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(v + i, _mm256_mul_ps(_mm256_loadu_ps(v + i), sv));
    }
    for (; i < n; ++i) v[i] *= s;
}

} // namespace themis::simd

#endif // x86_64

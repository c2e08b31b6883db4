#include "themis/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace themis::simd {

double dot_neon(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t af = vld1q_f32(a + i);
        float32x4_t bf = vld1q_f32(b + i);
        float64x2_t alo = vcvt_f64_f32(vget_low_f32(af));
        float64x2_t ahi = vcvt_f64_f32(vget_high_f32(af));
        float64x2_t blo = vcvt_f64_f32(vget_low_f32(bf));
        float64x2_t bhi = vcvt_f64_f32(vget_high_f32(bf));
        acc0 = vfmaq_f64(acc0, alo, blo);
        acc1 = vfmaq_f64(acc1, ahi, bhi);
    }
    double sum = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

void scale_neon(float* v, std::size_t n, float s) {
    float32x4_t sv = vdupq_n_f32(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(v + i, vmulq_f32(vld1q_f32(v + i), sv));
    }
    for (; i < n; ++i) v[i] *= s;
}

} // namespace themis::simd

#endif // aarch64

#include "themis/simd/kernels.hpp"

namespace themis::simd {

double dot_scalar(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

void scale_scalar(float* v, std::size_t n, float s) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= s;
}

} // namespace themis::simd

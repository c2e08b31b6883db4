#include "themis/simd/kernels.hpp"

#include "themis/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

namespace themis::simd {

namespace {

std::atomic<bool> g_force_scalar{false};

KernelSet detect() {
    const char* env = std::getenv("THEMIS_FORCE_SCALAR");
    if (env && env[0] == '1') {
        return {dot_scalar, scale_scalar, "scalar"};
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return {dot_avx2, scale_avx2, "avx2"};
    }
#endif
#if defined(__aarch64__)
    return {dot_neon, scale_neon, "neon"};
#endif
    return {dot_scalar, scale_scalar, "scalar"};
}

const KernelSet& scalar_set() {
    static const KernelSet set{dot_scalar, scale_scalar, "scalar"};
    return set;
}

} // namespace

#if !(defined(__x86_64__) || defined(_M_X64))
bool avx2_compiled() {
    return false;
}
#endif

const KernelSet& active_kernels() {
    static const KernelSet detected = detect();
    return g_force_scalar.load(std::memory_order_relaxed) ? scalar_set() : detected;
}

const char* kernel_name() {
    return active_kernels().name;
}

void force_scalar(bool on) {
    g_force_scalar.store(on, std::memory_order_relaxed);
}

double dot(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(Errc::dimension_mismatch,
              "dot: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    return active_kernels().dot(a.data(), b.data(), a.size());
}

void scale_in_place(std::span<float> v, float s) {
    active_kernels().scale(v.data(), v.size(), s);
}

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(Errc::dimension_mismatch,
              "cosine: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    const KernelSet& k = active_kernels();
    double ab = k.dot(a.data(), b.data(), a.size());
    double aa = k.dot(a.data(), a.data(), a.size());
    double bb = k.dot(b.data(), b.data(), b.size());
    if (aa == 0.0 || bb == 0.0) {
        raise(Errc::zero_vector, "cosine of zero vector");
    }
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

} // namespace themis::simd

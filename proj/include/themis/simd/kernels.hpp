#pragma once

#include <cstddef>
#include <span>

namespace themis::simd {

// Vector kernels behind the embedding math (cosine screens, parsimony sums,
// theme alignment). Inputs are float vectors; dot products accumulate in
// double so metric values agree across the scalar and SIMD paths to ~1e-13,
// far inside every tolerance asserted downstream.
using DotFn = double (*)(const float*, const float*, std::size_t);
using ScaleFn = void (*)(float*, std::size_t, float);

struct KernelSet {
    DotFn dot;
    ScaleFn scale;
    const char* name;
};

// Reference implementations; always available, used as the equivalence oracle.
double dot_scalar(const float* a, const float* b, std::size_t n);
void scale_scalar(float* v, std::size_t n, float s);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const float* a, const float* b, std::size_t n);
void scale_avx2(float* v, std::size_t n, float s);
bool avx2_compiled(); // true when the AVX2 translation unit was built
#endif

#if defined(__aarch64__)
double dot_neon(const float* a, const float* b, std::size_t n);
void scale_neon(float* v, std::size_t n, float s);
#endif

// Best kernel set for this machine, detected once at first use. Honors
// THEMIS_FORCE_SCALAR=1 in the environment.
const KernelSet& active_kernels();
const char* kernel_name();

// Test/CLI hook: route everything through the scalar reference kernels.
void force_scalar(bool on);

double dot(std::span<const float> a, std::span<const float> b);
void scale_in_place(std::span<float> v, float s);

// Standard cosine similarity; throws DimensionMismatch / ZeroVector.
double cosine(std::span<const float> a, std::span<const float> b);

} // namespace themis::simd

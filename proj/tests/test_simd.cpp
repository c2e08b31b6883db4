#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "themis/errors.hpp"
#include "themis/simd/kernels.hpp"
#include "themis/util/rng.hpp"

#include <cmath>
#include <vector>

using namespace themis;

namespace {

std::vector<float> random_vec(SplitMix64& rng, std::size_t n) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.next_unit() * 2.0 - 1.0);
    return v;
}

} // namespace

TEST_CASE("cosine fixtures") {
    std::vector<float> x{1.0f, 0.0f};
    std::vector<float> y{1.0f, 1.0f};
    std::vector<float> e1{1.0f, 0.0f};
    std::vector<float> e2{0.0f, 1.0f};
    CHECK(simd::cosine(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(simd::cosine(e1, e2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(simd::cosine(x, y) - 1.0 / std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("cosine error paths") {
    std::vector<float> a{1.0f, 0.0f};
    std::vector<float> z{0.0f, 0.0f};
    std::vector<float> d3{1.0f, 0.0f, 0.0f};
    CHECK_THROWS_AS(simd::cosine(a, z), Error);
    CHECK_THROWS_AS(simd::cosine(a, d3), Error);
}

TEST_CASE("cosine symmetry and bound on random vectors") {
    SplitMix64 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_vec(rng, 384);
        auto b = random_vec(rng, 384);
        double ab = simd::cosine(a, b);
        double ba = simd::cosine(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(std::abs(ab) <= 1.0 + 1e-12);
    }
}

TEST_CASE("active kernels match the scalar reference") {
    SplitMix64 rng(99);
    const auto& kernels = simd::active_kernels();
    INFO("active kernel set: " << kernels.name);
    for (std::size_t n : {1ul, 7ul, 8ul, 64ul, 383ul, 384ul, 1000ul}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        double fast = kernels.dot(a.data(), b.data(), n);
        double ref = simd::dot_scalar(a.data(), b.data(), n);
        CHECK(std::abs(fast - ref) <= 1e-10 * (1.0 + std::abs(ref)));

        auto v1 = a;
        auto v2 = a;
        kernels.scale(v1.data(), n, 0.3125f);
        simd::scale_scalar(v2.data(), n, 0.3125f);
        CHECK(v1 == v2); // element-wise product: bit-identical across paths
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variant agrees with scalar when supported") {
    if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))) {
        return; // nothing to compare on this machine
    }
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng.bounded(700);
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        double fast = simd::dot_avx2(a.data(), b.data(), n);
        double ref = simd::dot_scalar(a.data(), b.data(), n);
        CHECK(std::abs(fast - ref) <= 1e-10 * (1.0 + std::abs(ref)));
    }
}
#endif

TEST_CASE("force_scalar reroutes the dispatch") {
    simd::force_scalar(true);
    CHECK(std::string(simd::kernel_name()) == "scalar");
    simd::force_scalar(false);
}

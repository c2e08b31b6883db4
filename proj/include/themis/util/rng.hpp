#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace themis {

// splitmix64: the documented generator used for every seeded decision in a
// run. Constants from Steele, Lea & Flood (2014). All shuffles, samples and
// sub-stream derivations go through this so a seed fully determines a run.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased-enough bounded draw via 128-bit multiply-shift.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// FNV-1a, used only to fold sub-stream names into seeds.
std::uint64_t fnv1a64(std::string_view s);

// Derives an independent seed for a named sub-stream (e.g. "split",
// "judge-sample") from the run seed.
std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view name);

// Fisher-Yates over [0, n) driven by SplitMix64.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

// First k entries of a seeded shuffle of [0, n); k is clamped to n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, SplitMix64& rng);

} // namespace themis

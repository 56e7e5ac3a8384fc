/**
 * @file Random.h
 * @brief Seeded random source with platform-independent derived draws
 *
 * Only the raw 64-bit engine output is used; conversions to reals, bounded
 * integers and shuffles are done here so results do not depend on the
 * standard library's distribution implementations.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace czi {

/// SplitMix64 finalizer; derives independent seeds from (seed, stream).
constexpr uint64_t MixSeed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t Next() { return engine_(); }

    /// Uniform in [0,1) with 53 random bits.
    double Uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

    /// Standard normal via Box-Muller.
    double Normal() {
        double u1 = 1.0 - Uniform01();
        double u2 = Uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Unbiased integer in [0, n).
    uint64_t Index(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    template <typename T>
    void Shuffle(std::span<T> items) {
        for (size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[Index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace czi

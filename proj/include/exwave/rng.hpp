#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace exwave {

/// Deterministic random source. Wraps mt19937_64 with hand-rolled uniform
/// mappings so that results are identical across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    /// Uniform double strictly inside (0, 1).
    double uniform01() {
        // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    /// Uniform double strictly inside (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace detail

/// Stream splitting: every random draw in the project comes from a stream
/// derived as (master seed, tag, index). Streams in use:
///   ("layer-q", l)      fixed-point sampling for layer l
///   ("layer-phase", l)  phase initialization for layer l
///   ("shuffle", epoch)  per-epoch batch permutation
/// Toggling one consumer (e.g. disabling the random shift) leaves every
/// other stream untouched, which keeps ablation runs seed-comparable.
inline uint64_t derive_stream(uint64_t master, std::string_view tag, uint64_t index) {
    return detail::splitmix64(detail::splitmix64(master ^ detail::fnv1a64(tag)) ^ index);
}

}  // namespace exwave

#pragma once

#include <cstdint>

namespace qwalk {

// SplitMix64 (Steele, Lea, Flood 2014; same algorithm as Java's
// SplittableRandom and the seeder recommended for xoshiro).  Chosen because
// it is tiny, fast, has a documented closed-form state transition
// (state += gamma) and therefore gives portable, platform-independent
// streams.  All classical randomness in the simulator flows through this
// generator; nothing uses std:: distributions, whose output is not
// specified across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // True with probability p.  For p = 0.5 this is an exactly fair coin
    // (it tests the top of 53 uniform bits).
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::uint64_t state_;
};

// Finalizer of SplitMix64, usable as a standalone 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed for the k-th parallel stream rooted at `root`.  This is the k-th
// output of SplitMix64(root), computed in O(1) from the closed-form state,
// so shards can be seeded independently of execution order.
inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t k) {
    return mix64(root + 0x9E3779B97F4A7C15ull * (k + 1));
}

// FNV-1a over a byte range; used for content-derived seeds and fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qwalk

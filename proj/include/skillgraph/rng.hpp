#pragma once

#include <cstdint>

namespace skillgraph {

// splitmix64: tiny, portable, and good enough for sampling and init.
// Explicit value-passed state so concurrent callers derive independent
// streams instead of sharing a generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0, 1), 53 bits of entropy
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform double in [lo, hi)
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// One mixing step of splitmix64 applied to a value (not a stream).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-(iteration, batch item) stream derivation.
inline std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::uint64_t t, std::uint64_t b) {
    return mix64(mix64(mix64(run_seed) ^ t) ^ b);
}

} // namespace skillgraph

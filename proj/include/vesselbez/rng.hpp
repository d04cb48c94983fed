#pragma once

#include <cstdint>

namespace vesselbez {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so per-segment and per-pixel draws do not depend on iteration order or thread count.

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class RngStream : std::uint64_t {
    tortuosity_sign = 1,
    arc_drop = 2,
    pixel_drop = 3,
    synth = 4,
};

inline constexpr std::uint64_t counter_hash(std::uint64_t seed, RngStream stream, std::uint64_t counter) {
    return mix64(mix64(seed ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL)) ^ mix64(counter));
}

/// Uniform double in [0, 1) with 53 random bits.
inline constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential stream on top of counter_hash, for places where draw order is fixed (synthetic trees).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngStream stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return counter_hash(seed_, stream_, counter_++); }
    double uniform() { return to_unit(next_u64()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t seed_;
    RngStream stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace vesselbez

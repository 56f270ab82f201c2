#pragma once

#include <cstdint>

namespace torwalk {

// splitmix64: tiny, fast, and fully deterministic across platforms.
// Used both as the replicate stream derivation hash and as the sampler.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() { return splitmix64_next(state); }
    // uniform in [0,1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Stream for one replicate: seed xor splitmix64(replicate_index).
inline Rng replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
    std::uint64_t s = replicate;
    return Rng(seed ^ splitmix64_next(s));
}

} // namespace torwalk

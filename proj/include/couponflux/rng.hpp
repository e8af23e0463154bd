#pragma once

// Deterministic random number generation.
//
// Every Monte Carlo routine in this library draws from a counter-based stream:
// sample i of a run seeded with s uses stream_rng(s, i). Results are therefore
// a pure function of (parameters, seed, sample index), independent of thread
// count, batching, or SIMD width. The vectorized engine advances eight such
// streams in lockstep and produces bit-identical output to the scalar path.

#include <cstdint>

namespace couponflux {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna). Fast, 256-bit state, passes BigCrush.
class Xoshiro256pp {
public:
    Xoshiro256pp() : s_{1, 2, 3, 4} {}

    explicit Xoshiro256pp(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    std::uint64_t next() {
        std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in {0,...,n-1} via the multiply-shift trick on the high 32 bits.
    // Bias is O(n / 2^32), negligible for the state-space sizes used here. The
    // vector engine computes the same function, which is why this form is used
    // instead of rejection sampling.
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(((next() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
    }

    const std::uint64_t* state() const { return s_; }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

// Stream seed derivation: decorrelates consecutive sample indices before they
// reach splitmix. stream 0 with seed s is NOT the same as Xoshiro256pp(s).
inline Xoshiro256pp stream_rng(std::uint64_t seed, std::uint64_t stream) {
    return Xoshiro256pp(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
}

// Default CLI seed.
inline constexpr std::uint64_t kDefaultSeed = 0x5EEDC01107ull;

}

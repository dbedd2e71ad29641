#pragma once

// Seeded, portable random streams. The simulator needs bit-reproducible
// runs across platforms, so sampling is done by explicit inverse-transform
// formulas on top of xoshiro256++ rather than std:: distributions (whose
// output is implementation-defined).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace cachenet {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used both for stream splitting and for config/output digests.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256++ (Blackman/Vigna, public domain reference implementation).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Derives an independent stream for a named purpose, e.g. per-node
    // arrival processes. Adding a stream never perturbs existing ones.
    static Rng stream(std::uint64_t seed, std::string_view label) {
        return Rng(seed ^ fnv1a(label));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_open_double() { return 1.0 - next_double(); }

    double exponential(double rate) {
        if (rate <= 0.0) throw std::domain_error("exponential: rate must be > 0");
        return -std::log(next_open_double()) / rate;
    }

    // Box-Muller; one variate per call keeps the stream position simple.
    double normal(double mean, double stddev) {
        const double u1 = next_open_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace cachenet

#pragma once

#include <cmath>
#include <cstdint>

namespace mbp {

/// Avalanche mix (SplitMix64 finalizer). Used to derive independent
/// sub-seeds so that Monte Carlo work can be scheduled in any order.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based sub-seed for (stream a, element b) of a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ (a + 0x9e3779b97f4a7c15ull));
    h = mix64(h ^ (b + 0x9e3779b97f4a7c15ull));
    return h;
}

/// Small deterministic PRNG with identical output on every platform.
/// The standard <random> distributions are implementation-defined, so all
/// sampling in this library goes through this generator instead.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        return mix64(z);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Standard normal draws via Box-Muller, caching the paired value.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform_pos();
        const double u2 = rng_.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mbp

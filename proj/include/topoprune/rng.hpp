#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace topoprune {

/// SplitMix64 (Steele, Lea & Flood 2014). Every random draw in the library
/// comes from one of these, so results are bit-identical across platforms:
/// uniforms take the top 53 bits, Gaussians use the Box-Muller transform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    /// Stream derived from a seed and a tuple of integer keys. Streams with
    /// different key tuples are statistically independent.
    static SplitMix64 keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
        std::uint64_t h = mix(seed ^ 0x9e3779b97f4a7c15ULL);
        for (std::uint64_t k : keys) {
            h = mix(h ^ mix(k + 0x632be59bd9b4e019ULL));
        }
        return SplitMix64(h);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal draw (Box-Muller, one value per call).
    double normal() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

/// Seed for a named pipeline phase, derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t phase_tag);

}  // namespace topoprune

#pragma once

#include <complex>
#include <cstdint>

namespace pfroots {

/// xoshiro256** seeded through splitmix64. The generator is spelled out
/// here so that a given seed produces the same stream on every platform,
/// which keeps solution JSON and path accounting reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            // splitmix64 step
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unit-modulus complex number with uniform phase.
    std::complex<double> unit_complex() {
        const double theta = 6.283185307179586476925286766559 * uniform();
        return {std::cos(theta), std::sin(theta)};
    }

    /// Generic nonzero complex coefficient: uniform phase, modulus in [0.5, 1.5].
    /// Bounded away from zero so random linear forms stay well scaled.
    std::complex<double> coefficient() {
        return unit_complex() * (0.5 + uniform());
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace pfroots

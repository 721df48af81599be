#ifndef FISIM_RNG_HPP
#define FISIM_RNG_HPP

#include <array>
#include <cstdint>

namespace fisim {

/// xoshiro256++ (Blackman/Vigna), seeded through splitmix64. The uniform
/// integer stream is integer-arithmetic only and therefore bit-identical
/// on any conforming platform; see README for the exact recurrences.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform double in [0,1) with 53 random bits: (next() >> 11) * 2^-53.
    double uniform01();

private:
    std::array<std::uint64_t, 4> state_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Poisson draw. Means below 10 use Knuth's product-of-uniforms inversion;
/// larger means use the PTRS transformed-rejection sampler. mean <= 0
/// yields 0.
long poisson_sample(Xoshiro256pp& rng, double mean);

} // namespace fisim

#endif

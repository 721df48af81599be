#include "fisim/rng.hpp"

#include <cmath>

namespace fisim {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_)
        word = splitmix64(sm);
}

std::uint64_t Xoshiro256pp::next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Xoshiro256pp::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

long poisson_knuth(Xoshiro256pp& rng, double mean) {
    const double limit = std::exp(-mean);
    long k = 0;
    double product = 1.0;
    do {
        ++k;
        product *= rng.uniform01();
    } while (product > limit);
    return k - 1;
}

// Transformed rejection with squeeze (Hormann's PTRS), valid for mean >= 10.
long poisson_ptrs(Xoshiro256pp& rng, double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double u = rng.uniform01() - 0.5;
        double v = rng.uniform01();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0))
            return static_cast<long>(kf);
    }
}

} // namespace

long poisson_sample(Xoshiro256pp& rng, double mean) {
    if (!(mean > 0.0))
        return 0;
    if (mean < 10.0)
        return poisson_knuth(rng, mean);
    return poisson_ptrs(rng, mean);
}

} // namespace fisim

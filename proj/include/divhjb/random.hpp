#ifndef DIVHJB_RANDOM_HPP
#define DIVHJB_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace divhjb {

using RngStream = std::mt19937_64;

/// Independent stream for (seed, stream id). The pair is mixed with two
/// rounds of SplitMix64 so neighbouring ids give unrelated engine states.
inline RngStream make_stream(std::uint64_t seed, std::uint64_t stream_id) {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return RngStream(splitmix(splitmix(seed) ^ stream_id));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(RngStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF exponential variate with the given rate.
inline double exponential_from_uniform(double u, double rate) {
    return -std::log1p(-u) / rate;
}

inline double sample_exponential(RngStream& rng, double rate) {
    return exponential_from_uniform(uniform01(rng), rate);
}

/// Erlang(k, xi) claim: sum of k independent Exp(xi) variates.
inline double sample_claim(RngStream& rng, int k, double xi) {
    double total = 0.0;
    for (int i = 0; i < k; ++i)
        total += sample_exponential(rng, xi);
    return total;
}

} // namespace divhjb

#endif // DIVHJB_RANDOM_HPP

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wfc {

/// splitmix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) noexcept {
    return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

/// 64-bit Mersenne Twister with a portable uniform draw in [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given mean, by inverse CDF.
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace wfc

#pragma once

#include <cstdint>
#include <random>

namespace npseg {

/// SplitMix64 finaliser; used to derive well-separated seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replicate `index` under base seed `seed`. Replicate streams depend only on
/// (seed, index), so parallel runs reproduce serial ones.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Standard normal quantile (Wichura AS241, relative accuracy about 1e-16).
double inverse_normal_cdf(double p) noexcept;

/// mt19937_64 with portable uniform and normal draws. std::*_distribution are avoided
/// because their output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's rejection method).
    std::uint64_t below(std::uint64_t bound);

    double normal(double mean, double sd) { return mean + sd * inverse_normal_cdf(uniform_open()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace npseg

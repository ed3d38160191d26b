#pragma once

#include <cstdint>
#include <span>

#include "adjg/normal.hpp"

namespace adjg {

namespace detail {

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based uniform stream: every draw is a pure function of
// (seed, stream, counter). Streams are assigned one per Monte Carlo path so
// draws do not depend on thread scheduling, and reruns (tangent, adjoint,
// finite-difference) replay identical numbers.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    static double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        using detail::mix64;
        const std::uint64_t h =
            mix64(mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^ stream) ^ counter);
        // 53-bit mantissa, offset by half an ulp so the result stays in (0,1).
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_uniform() { return uniform_at(seed_, stream_, counter_++); }

    double next_normal() { return norm_inv_cdf(next_uniform()); }

    void fill_normal(std::span<double> out) {
        for (double& x : out) x = next_normal();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace adjg

#pragma once

#include <cmath>
#include <cstdint>

namespace ordexp {

/// Counter-derived random stream: stream (seed, index) is a splitmix64
/// sequence whose start is a hash of the pair, so any replication can be
/// generated independently of scheduling order. Draws are identical
/// across platforms for the integer part; exponentials go through libm.
class SubStream {
public:
    SubStream(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) +
                     0x9e3779b97f4a7c15ULL * (index + 1))) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard exponential by inverse transform, -log(1 - U).
    double next_exponential() noexcept { return -std::log1p(-next_unit()); }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Stable per-cell seed derivation for scenario grids.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t index) noexcept {
    return SubStream::mix(SubStream::mix(master ^ 0x243f6a8885a308d3ULL) +
                          0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace ordexp

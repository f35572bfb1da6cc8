#pragma once

#include "irs/types.hpp"

#include <array>
#include <cstdint>

namespace irs {

/// SplitMix64 finalizer, used to derive Philox keys from (seed, tag) pairs.
std::uint64_t mix64(std::uint64_t x);

/// Combines a user seed with a purpose tag into a Philox key.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag)
{
    return mix64(mix64(seed) ^ (tag * 0x9E3779B97F4A7C15ULL));
}

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 128-bit counter is laid out as [block_lo, block_hi, stream_a, stream_b];
/// the two stream words identify an independent stream (e.g. link id and trial
/// index) so that draws never depend on scheduling order.
class CounterRng {
public:
    CounterRng(std::uint64_t key, std::uint32_t stream_a = 0, std::uint32_t stream_b = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform double in the open interval (0, 1).
    double uniform();
    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal via Box-Muller.
    double normal();
    /// Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
    cdouble complex_normal();

    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace irs

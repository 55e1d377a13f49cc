#pragma once

#include <cstdint>

namespace qperp {

// Counter-based 64-bit generator: the SplitMix64 output mix applied to a
// Weyl sequence. The k-th draw is a pure function of (seed, stream, k), so
// any stream can be replayed from (seed, position) and independent streams
// can be derived deterministically for parallel batch generation.
class RngState {
public:
    explicit RngState(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform on (0, 1]; 53-bit resolution.
    double next_unit() noexcept;

    // Rate-1 exponential via inverse transform.
    double next_exponential() noexcept;

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double next_normal() noexcept;

    // Independent stream derived from this state's seed and stream_id.
    RngState derive(std::uint64_t stream_id) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t position() const noexcept { return pos_; }

private:
    std::uint64_t seed_;
    std::uint64_t pos_ = 0;
};

} // namespace qperp

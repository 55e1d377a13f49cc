#include "qperp/rng.hpp"

#include <cmath>
#include <numbers>

namespace qperp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

RngState::RngState(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed) {
    if (stream != 0) {
        seed_ = mix64(seed + stream * 0xD1B54A32D192ED03ull);
    }
}

std::uint64_t RngState::next_u64() noexcept {
    ++pos_;
    return mix64(seed_ + pos_ * kGolden);
}

double RngState::next_unit() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngState::next_exponential() noexcept {
    return -std::log(next_unit());
}

double RngState::next_normal() noexcept {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngState RngState::derive(std::uint64_t stream_id) const noexcept {
    return RngState(seed_, stream_id + 1);
}

} // namespace qperp

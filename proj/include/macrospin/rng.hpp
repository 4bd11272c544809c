#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "macrospin/constants.hpp"
#include "macrospin/vec.hpp"

namespace macrospin {

// ---------------------------------------------------------------------------
// Philox4x32-10 counter-based generator
// ---------------------------------------------------------------------------
//
// Each 128-bit counter block maps independently to 128 random bits, so a
// stream position is an address, not a history: draws depend only on
// (seed, stream, block). Parallel scheduling can never perturb the sequence,
// which is what makes ensemble statistics bit-reproducible across any worker
// count.

namespace detail {

inline void philox_mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                           std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        philox_mulhilo(m0, ctr[0], hi0, lo0);
        philox_mulhilo(m1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

inline double u64_to_unit_open(std::uint64_t v) {
    // (0, 1): top 52 bits plus a half-ulp offset, never exactly 0 or 1.
    // (With 53 bits the offset is not representable at the top of the range
    // and the sum rounds up to exactly 1.0.)
    return (static_cast<double>(v >> 12) + 0.5) * 0x1p-52;
}

} // namespace detail

/// One independent random stream, addressed by (seed, stream, block).
/// Each block yields 128 bits; normals use Box-Muller, one pair per block.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint64_t block() const { return block_; }
    void seek(std::uint64_t block) { block_ = block; }

    /// 128 raw bits of the next block.
    std::array<std::uint32_t, 4> next_block() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        ++block_;
        return detail::philox4x32(ctr, key_);
    }

    /// One uniform draw in (0, 1); consumes one block.
    double uniform() {
        const auto b = next_block();
        return detail::u64_to_unit_open((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
    }

    /// A pair of independent standard normals; consumes one block.
    std::array<double, 2> normal_pair() {
        const auto b = next_block();
        const double u1 =
            detail::u64_to_unit_open((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
        const double u2 =
            detail::u64_to_unit_open((static_cast<std::uint64_t>(b[2]) << 32) | b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

    double normal() { return normal_pair()[0]; }

    /// Three independent standard normals; consumes two blocks (the fourth
    /// normal is discarded so the block count per call is fixed).
    Vec3 normal3() {
        const auto p1 = normal_pair();
        const auto p2 = normal_pair();
        return {p1[0], p1[1], p2[0]};
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
};

} // namespace macrospin

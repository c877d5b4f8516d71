#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qread {

//! Counter-based random stream (Philox4x32-10).
//!
//! Streams are keyed by a 64-bit seed and addressed by a (point, trial)
//! pair, so any trial of any grid point can be generated independently
//! and in any order. The counter block is laid out as
//! {block, point, trial_lo, trial_hi}: distinct addresses can never
//! produce overlapping sequences.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint32_t point_index = 0,
                 std::uint64_t trial_index = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          point_(point_index),
          trial_lo_(static_cast<std::uint32_t>(trial_index)),
          trial_hi_(static_cast<std::uint32_t>(trial_index >> 32)) {}

    std::uint32_t next_u32() noexcept {
        if (pos_ == 4) refill();
        return block_[pos_++];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    //! Single fair bit, served from a 32-bit pool.
    int next_bit() noexcept {
        if (bit_count_ == 0) {
            bit_pool_ = next_u32();
            bit_count_ = 32;
        }
        const int b = static_cast<int>(bit_pool_ & 1u);
        bit_pool_ >>= 1;
        --bit_count_;
        return b;
    }

    //! Uniform double in (0, 1].
    double next_unit() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
    }

    //! Standard normal pair via Box-Muller.
    std::array<double, 2> next_gaussian_pair() noexcept {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * pi() * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    double next_gaussian() noexcept {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const auto z = next_gaussian_pair();
        cached_ = z[1];
        have_cached_ = true;
        return z[0];
    }

    //! Raw Philox4x32-10 block, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox4x32(
        std::array<std::uint32_t, 4> ctr,
        std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    static constexpr double pi() { return 3.141592653589793238462643383279502884; }

    void refill() noexcept {
        block_ = philox4x32({block_counter_++, point_, trial_lo_, trial_hi_}, key_);
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t point_;
    std::uint32_t trial_lo_;
    std::uint32_t trial_hi_;
    std::uint32_t block_counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
    std::uint32_t bit_pool_ = 0;
    int bit_count_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace qread

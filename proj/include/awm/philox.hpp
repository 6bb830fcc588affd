// philox.hpp: Philox4x32-10 counter-based generator.
//
// Salmon, Moraes, Dror, Shaw, "Parallel random numbers: as easy as 1, 2, 3" (SC'11).
// Every trajectory owns an independent stream addressed by (master_seed,
// traj_index); the draw counter is the only mutable state, so results do not
// depend on which worker evaluates a trajectory.

#pragma once

#include <array>
#include <cstdint>

namespace awm {

struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static constexpr Counter round(Counter c, Key k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kM0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kM1} * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }

    /// Ten rounds with the Weyl key schedule.
    static constexpr Counter apply(Counter c, Key k) noexcept {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += kW0;
                k[1] += kW1;
            }
            c = round(c, k);
        }
        return c;
    }
};

/// Uniform doubles from one Philox stream. Each block yields two doubles with
/// 53 random bits; draw order is fixed so replays are bit-identical.
class TrajectoryRng {
public:
    TrajectoryRng(std::uint64_t master_seed, std::uint64_t traj_index) noexcept
        : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
          traj_{traj_index} {}

    /// Uniform on [0, 1).
    double uniform() noexcept {
        if (have_ == 0) refill();
        return buffer_[--have_];
    }

    std::uint64_t blocks_consumed() const noexcept { return block_; }

private:
    void refill() noexcept {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(traj_),
                                      static_cast<std::uint32_t>(traj_ >> 32)};
        const auto out = Philox4x32::apply(ctr, key_);
        ++block_;
        constexpr double kScale = 0x1.0p-53;
        const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
        const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
        // buffer is consumed from the back: a first, then b
        buffer_[1] = static_cast<double>(a >> 11) * kScale;
        buffer_[0] = static_cast<double>(b >> 11) * kScale;
        have_ = 2;
    }

    Philox4x32::Key key_;
    std::uint64_t traj_;
    std::uint64_t block_ = 0;
    std::array<double, 2> buffer_{};
    int have_ = 0;
};

}  // namespace awm

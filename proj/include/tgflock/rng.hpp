#pragma once

#include <cstdint>

namespace tgflock {

/// Counter-based 64-bit generator: the k-th draw of stream `stream` under
/// `seed` is a pure function of (seed, stream, k). Streams let independent
/// consumers (initial data, graph schedules, weight perturbations) draw from
/// one seed without interfering.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    [[nodiscard]] std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform01() noexcept;
    [[nodiscard]] double uniform(double lo, double hi) noexcept;
    /// Uniform integer in [0, bound); bound must be positive.
    [[nodiscard]] std::uint64_t below(std::uint64_t bound) noexcept;

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace tgflock

#pragma once

#include <cstdint>
#include <limits>

namespace cubeskel {

/// Counter-based generator: the i-th draw of stream s under seed k is a pure
/// function of (k, s, i), so results do not depend on call interleaving.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return at(counter_++); }
    result_type at(std::uint64_t index) const noexcept;

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller on two consecutive draws).
    double normal() noexcept;
    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept;

    CounterRng fork(std::uint64_t substream) const noexcept;
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace cubeskel

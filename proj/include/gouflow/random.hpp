#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace gouflow {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC 2011). Stateless: maps (counter, key) to 128 bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key) noexcept;
};

/// Counter-based random stream keyed by (seed, stream index).
///
/// Every Monte Carlo path draws from its own stream, so results depend only on
/// (seed, path index) and never on how paths are distributed across workers.
/// Satisfies UniformRandomBitGenerator, so the <random> distributions apply.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double normal() noexcept { return normal_(*this); }
    /// Exponential with the given rate.
    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

  private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
    std::normal_distribution<double> normal_;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derive a seed for a named sub-experiment (e.g. "the R side of a duality
/// probe") so that independent estimators never share streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) noexcept;

}  // namespace gouflow

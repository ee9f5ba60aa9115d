#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace latentsearch {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based seed for replica `replica` of cell `cell` in a campaign seeded with `base`.
///
/// Each argument passes through its own SplitMix64 round, so the mapping is
/// injective in (cell, replica) for a fixed base and does not depend on the
/// order in which jobs are scheduled.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t replica) noexcept;

/// Seedable random stream used everywhere a run needs randomness.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All transforms to reals are implemented here instead of through
/// <random> distributions, whose algorithms are implementation-defined, so a
/// given seed yields the same run on every toolchain.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Marsaglia polar method; the paired deviate is discarded so every call
    /// consumes a whole number of engine outputs and carries no hidden state.
    double standard_normal();

    /// Uniform integer on [0, n). Requires n > 0.
    std::size_t index(std::size_t n);

    /// True with probability p. p >= 1 and p <= 0 are decided without a draw.
    bool bernoulli(double p);

    /// Child stream seeded from this stream's next output.
    RandomStream split();

  private:
    std::mt19937_64 engine_;
};

} // namespace latentsearch

#pragma once

#include <cstdint>

namespace divilab {

/// Counter-based generator: the i-th output is a pure function of (seed, i),
/// so draws can be split across workers without changing the stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
        : seed_(seed), counter_(counter) {}

    [[nodiscard]] static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t index) noexcept {
        // splitmix64 finalizer applied to a Weyl sequence
        std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() noexcept { return at(seed_, counter_++); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, bound) by rejection, bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % bound;
    }

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace divilab

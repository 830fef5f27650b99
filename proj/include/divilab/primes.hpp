#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace divilab {

namespace detail {

[[nodiscard]] inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

[[nodiscard]] inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin, exact for every 64-bit input.
[[nodiscard]] inline bool is_prime_u64(std::uint64_t n) noexcept {
    if (n < 2) return false;
    constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : small) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : small) {
        std::uint64_t x = detail::powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// All primes p <= n, ascending (plain Eratosthenes on odd numbers).
[[nodiscard]] inline std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    if (n < 2) return out;
    out.push_back(2);
    const std::uint64_t half = (n - 1) / 2;  // index i <-> 2i+1, i in [1, half]
    std::vector<bool> composite(half + 1, false);
    for (std::uint64_t i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const std::uint64_t p = 2 * i + 1;
        out.push_back(p);
        for (std::uint64_t j = (p * p - 1) / 2; j <= half; j += p) composite[j] = true;
    }
    return out;
}

/// Unbounded ascending prime stream backed by a segmented sieve.
class PrimeStream {
public:
    explicit PrimeStream(std::uint64_t segment = 1u << 18) : segment_(segment) {}

    std::uint64_t next() {
        while (pos_ >= buffer_.size()) refill();
        return buffer_[pos_++];
    }

private:
    void refill() {
        buffer_.clear();
        pos_ = 0;
        const std::uint64_t lo = hi_;
        const std::uint64_t hi = lo + segment_;
        const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(hi))) + 1;
        if (base_.empty() || base_.back() < root) base_ = primes_up_to(2 * root + 1000);
        std::vector<bool> composite(segment_, false);
        for (std::uint64_t p : base_) {
            if (p * p >= hi) break;
            std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
            for (std::uint64_t m = start; m < hi; m += p) composite[m - lo] = true;
        }
        for (std::uint64_t v = std::max<std::uint64_t>(lo, 2); v < hi; ++v) {
            if (!composite[v - lo]) buffer_.push_back(v);
        }
        hi_ = hi;
    }

    std::uint64_t segment_;
    std::uint64_t hi_ = 0;
    std::vector<std::uint64_t> base_;
    std::vector<std::uint64_t> buffer_;
    std::size_t pos_ = 0;
};

}  // namespace divilab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <divilab/rng.hpp>

namespace oracle {

// Independent brute-force reimplementations used as test oracles. Nothing
// here calls into the library except the random generator.

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> lo, hi;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        lo.push_back(d);
        if (d * d != n) hi.push_back(n / d);
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> factor(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> f;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline int mobius(std::uint64_t n) {
    int m = 1;
    for (auto [p, e] : factor(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

/// Largest number of divisors in a window (e^u, e^(u+1)], found by trying
/// every divisor as the left-most element.
inline std::uint64_t delta(std::uint64_t n) {
    const auto ds = divisors(n);
    const long double e = std::exp(1.0L);
    std::uint64_t best = 0;
    for (std::uint64_t d : ds) {
        std::uint64_t c = 0;
        for (std::uint64_t d2 : ds) c += d2 >= d && static_cast<long double>(d2) < e * static_cast<long double>(d);
        best = std::max(best, c);
    }
    return best;
}

/// sup over windows (e^u, e^(u+v)], 0 <= v <= 1, of |sum w(d)|: every set of
/// consecutive divisors whose extreme ratio is below e is such a window.
template <class W>
double delta_weighted(std::uint64_t n, W w) {
    const auto ds = divisors(n);
    double best = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = i; j < ds.size(); ++j) {
            if (std::log(static_cast<long double>(ds[j])) - std::log(static_cast<long double>(ds[i])) >= 1) break;
            double s = 0;
            for (std::size_t l = i; l <= j; ++l) s += w(ds[l]);
            best = std::max(best, std::abs(s));
        }
    }
    return best;
}

inline std::uint64_t tau_plus(std::uint64_t n) {
    std::vector<int> cells;
    for (std::uint64_t d : divisors(n)) {
        int k = -1;
        while ((std::uint64_t{1} << (k + 1)) < d) ++k;  // 2^k < d <= 2^(k+1)
        cells.push_back(k);
    }
    std::sort(cells.begin(), cells.end());
    return static_cast<std::uint64_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

inline double e_r(std::uint64_t n, std::size_t r) {
    const auto ds = divisors(n);
    double best = INFINITY;
    for (std::size_t j = 0; j + r < ds.size(); ++j)
        best = std::min(best, std::log(static_cast<double>(ds[j + r])) - std::log(static_cast<double>(ds[j])));
    return best;
}

inline double g_sum(std::uint64_t n) {
    const auto ds = divisors(n);
    double s = 0;
    for (std::size_t j = 0; j + 1 < ds.size(); ++j) s += static_cast<double>(ds[j]) / static_cast<double>(ds[j + 1]);
    return s;
}

inline std::uint64_t count_multiples(const std::vector<std::uint64_t>& A, std::uint64_t x) {
    std::uint64_t c = 0;
    for (std::uint64_t n = 1; n <= x; ++n)
        c += std::any_of(A.begin(), A.end(), [n](std::uint64_t a) { return n % a == 0; });
    return c;
}

inline std::uint64_t phi(std::uint64_t n) {
    std::uint64_t c = 0;
    for (std::uint64_t m = 1; m <= n; ++m) c += std::gcd(m, n) == 1;
    return c;
}

inline std::uint64_t largest_prime_factor(std::uint64_t n) {
    const auto f = factor(n);
    return f.empty() ? 1 : f.back().first;
}

}  // namespace oracle

namespace gen {

/// Random subset of [lo, hi] of size in [1, max_size].
inline std::vector<std::uint64_t> subset(divilab::CounterRng& rng, std::uint64_t lo, std::uint64_t hi,
                                         std::size_t max_size) {
    const std::size_t size = 1 + rng.below(max_size);
    std::vector<std::uint64_t> v;
    for (std::size_t i = 0; i < size; ++i) v.push_back(lo + rng.below(hi - lo + 1));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace gen

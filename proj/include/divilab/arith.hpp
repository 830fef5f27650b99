#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "ext_nat.hpp"
#include "primes.hpp"
#include "sieve.hpp"

namespace divilab {

struct PrimePower {
    std::uint64_t prime;
    std::uint32_t exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime-power decomposition of n >= 1, primes strictly ascending.
class Factored {
public:
    Factored() = default;

    /// Validates the invariants (ascending primes, positive exponents, product = n).
    Factored(std::uint64_t n, std::vector<PrimePower> factors) : n_(n), factors_(std::move(factors)) {
        if (n == 0) throw DomainError("Factored requires n >= 1");
        std::uint64_t prod = 1;
        std::uint64_t prev = 1;
        for (const auto& f : factors_) {
            if (f.prime <= prev || f.exponent == 0) throw DomainError("malformed factorisation of " + std::to_string(n));
            for (std::uint32_t e = 0; e < f.exponent; ++e) prod = checked_mul(prod, f.prime);
            prev = f.prime;
        }
        if (prod != n) throw DomainError("factorisation does not multiply back to " + std::to_string(n));
    }

    [[nodiscard]] std::uint64_t n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<PrimePower>& factors() const noexcept { return factors_; }

    /// Number of distinct prime factors.
    [[nodiscard]] std::uint32_t omega() const noexcept { return static_cast<std::uint32_t>(factors_.size()); }
    /// Number of prime factors counted with multiplicity.
    [[nodiscard]] std::uint32_t big_omega() const noexcept {
        std::uint32_t s = 0;
        for (const auto& f : factors_) s += f.exponent;
        return s;
    }
    [[nodiscard]] std::uint64_t p_plus() const noexcept { return factors_.empty() ? 1 : factors_.back().prime; }
    [[nodiscard]] ExtNat p_minus() const noexcept {
        return factors_.empty() ? ExtNat::infinity() : ExtNat(factors_.front().prime);
    }
    /// j-th smallest distinct prime factor, 1-based.
    [[nodiscard]] std::uint64_t prime(std::size_t j) const {
        if (j == 0 || j > factors_.size()) throw DomainError("prime index out of range");
        return factors_[j - 1].prime;
    }

    friend bool operator==(const Factored&, const Factored&) = default;

private:
    struct Unchecked {};
    Factored(Unchecked, std::uint64_t n, std::vector<PrimePower> f) : n_(n), factors_(std::move(f)) {}
    friend Factored factor(std::uint64_t, const SpfSieve&);
    friend Factored factor_trial(std::uint64_t);

    std::uint64_t n_ = 1;
    std::vector<PrimePower> factors_;
};

/// Factorisation by repeated smallest-prime-factor lookup, 1 <= n <= limit.
[[nodiscard]] inline Factored factor(std::uint64_t n, const SpfSieve& sieve) {
    if (n == 0 || n > sieve.limit()) {
        throw OutOfRangeError("factor(" + std::to_string(n) + ") outside [1, " + std::to_string(sieve.limit()) + "]");
    }
    const std::uint64_t orig = n;
    std::vector<PrimePower> out;
    while (n > 1) {
        const std::uint64_t p = sieve.spf_unchecked(n);
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    return Factored(Factored::Unchecked{}, orig, std::move(out));
}

/// Trial-division factorisation for arguments beyond a sieve (n up to ~10^12 is fast).
[[nodiscard]] inline Factored factor_trial(std::uint64_t n) {
    if (n == 0) throw DomainError("factor_trial(0)");
    const std::uint64_t orig = n;
    std::vector<PrimePower> out;
    bool cofactor_composite = false;
    for (std::uint64_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
        if (p > 1000 && !cofactor_composite) {
            if (is_prime_u64(n)) break;
            cofactor_composite = true;
        }
        if (n % p) continue;
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
        cofactor_composite = false;
    }
    if (n > 1) out.push_back({n, 1});
    return Factored(Factored::Unchecked{}, orig, std::move(out));
}

/// Default cap on tau(n) for divisor enumeration.
inline constexpr std::size_t kDefaultDivisorCap = 1'000'000;

[[nodiscard]] inline std::uint64_t tau_of(const Factored& f) {
    std::uint64_t t = 1;
    for (const auto& pp : f.factors()) t = checked_mul(t, pp.exponent + 1);
    return t;
}

/// Writes the divisors of f into `out`, ascending.
inline void divisors_into(const Factored& f, std::vector<std::uint64_t>& out,
                          std::size_t cap = kDefaultDivisorCap) {
    if (tau_of(f) > cap) throw ResourceError("tau(" + std::to_string(f.n()) + ") exceeds divisor cap");
    out.assign(1, 1);
    for (const auto& pp : f.factors()) {
        const std::size_t base = out.size();
        std::uint64_t pk = 1;
        for (std::uint32_t e = 1; e <= pp.exponent; ++e) {
            pk *= pp.prime;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
}

/// Sorted divisors of n with their natural logarithms.
struct DivisorSpectrum {
    Factored factorization;
    std::vector<std::uint64_t> divisors;
    std::vector<double> logs;

    [[nodiscard]] std::uint64_t n() const noexcept { return factorization.n(); }
    [[nodiscard]] std::size_t tau() const noexcept { return divisors.size(); }
};

inline void spectrum_into(const Factored& f, DivisorSpectrum& spec, std::size_t cap = kDefaultDivisorCap) {
    spec.factorization = f;
    divisors_into(f, spec.divisors, cap);
    spec.logs.resize(spec.divisors.size());
    for (std::size_t i = 0; i < spec.divisors.size(); ++i) spec.logs[i] = std::log(static_cast<double>(spec.divisors[i]));
}

[[nodiscard]] inline DivisorSpectrum divisors(const Factored& f, std::size_t cap = kDefaultDivisorCap) {
    DivisorSpectrum s;
    spectrum_into(f, s, cap);
    return s;
}

/// Reusable buffers for range scans: `build(n)` refreshes the spectrum in place.
class SpectrumBuilder {
public:
    explicit SpectrumBuilder(const SpfSieve& sieve, std::size_t cap = kDefaultDivisorCap) : sieve_(&sieve), cap_(cap) {}
    const DivisorSpectrum& build(std::uint64_t n) {
        spectrum_into(factor(n, *sieve_), spec_, cap_);
        return spec_;
    }

private:
    const SpfSieve* sieve_;
    std::size_t cap_;
    DivisorSpectrum spec_;
};

struct ArithmeticFunctions {
    std::uint64_t tau;
    std::uint64_t sigma;
    std::uint32_t omega;
    std::uint32_t big_omega;
    int mu;
    std::uint64_t phi;
    std::uint64_t p_plus;
    ExtNat p_minus;
};

[[nodiscard]] inline ArithmeticFunctions basic_fns(const Factored& f) {
    ArithmeticFunctions r{1, 1, f.omega(), f.big_omega(), 1, 1, f.p_plus(), f.p_minus()};
    for (const auto& pp : f.factors()) {
        r.tau = checked_mul(r.tau, pp.exponent + 1);
        std::uint64_t pk = 1;
        std::uint64_t geom = 1;
        for (std::uint32_t e = 1; e <= pp.exponent; ++e) {
            pk = checked_mul(pk, pp.prime);
            geom = checked_add(geom, pk);
        }
        r.sigma = checked_mul(r.sigma, geom);
        r.phi = checked_mul(r.phi, pk / pp.prime * (pp.prime - 1));
        r.mu = pp.exponent > 1 ? 0 : -r.mu;
    }
    return r;
}

/// Psi_1(x, y): squarefree n <= x with P+(n) <= y.
[[nodiscard]] inline std::uint64_t psi1_count(std::uint64_t x, std::uint64_t y, const SpfSieve& sieve) {
    if (x < 1 || y < 2) throw DomainError("psi1_count requires x >= 1, y >= 2");
    if (x > sieve.limit()) throw OutOfRangeError("psi1_count: x beyond sieve limit");
    std::uint64_t count = 1;  // n = 1
    for (std::uint64_t n = 2; n <= x; ++n) {
        std::uint64_t m = n;
        std::uint64_t last = 0;
        bool ok = true;
        while (m > 1) {
            const std::uint64_t p = sieve.spf_unchecked(m);
            if (p == last || p > y) {  // spf is non-decreasing along the walk
                ok = false;
                break;
            }
            last = p;
            m /= p;
            if (m % p == 0) {
                ok = false;
                break;
            }
        }
        count += ok;
    }
    return count;
}

}  // namespace divilab

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "density.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "rng.hpp"

namespace divilab {

/// Extended precision for the local-law tables; its exponent range keeps
/// e_j(p) representable (no underflow) for every p <= 10^4.
using Real = long double;

/// Elementary symmetric functions e_0..e_kmax of {1/(q-1) : q prime, q < p},
/// i.e. the coefficients s_j(p) of prod_{q<p} (1 + z/(q-1)).
struct SymmetricCoeffs {
    std::uint64_t p = 2;
    std::size_t kmax = 0;
    std::vector<Real> e;           ///< size kmax + 1
    std::size_t primes_below = 0;  ///< pi(p - 1)
    Real mertens = 1;              ///< prod_{q<p} (1 - 1/q)
};

/// Walks the primes in ascending order, keeping the symmetric functions of
/// the primes already passed. At each step `prime()` is the current p and the
/// state describes all q < p.
class LocalLawSweep {
public:
    explicit LocalLawSweep(std::size_t kmax) : kmax_(kmax), e_(kmax + 1, 0) {
        e_[0] = 1;
        p_ = stream_.next();
    }

    [[nodiscard]] std::uint64_t prime() const noexcept { return p_; }
    [[nodiscard]] const std::vector<Real>& e() const noexcept { return e_; }
    [[nodiscard]] Real mertens() const noexcept { return mertens_; }
    [[nodiscard]] std::size_t primes_below() const noexcept { return count_; }
    [[nodiscard]] std::size_t kmax() const noexcept { return kmax_; }

    /// lambda_k(p) at the current prime, 1 <= k <= kmax + 1.
    [[nodiscard]] Real lambda(std::size_t k) const {
        if (k == 0 || k > kmax_ + 1) throw DomainError("LocalLawSweep::lambda: k out of tracked range");
        return mertens_ * e_[k - 1] / static_cast<Real>(p_);
    }

    /// Folds the current prime into the state and moves to the next one.
    void advance() {
        const Real a = 1 / static_cast<Real>(p_ - 1);
        const std::size_t top = std::min(kmax_, count_ + 1);
        for (std::size_t j = top; j >= 1; --j) e_[j] += e_[j - 1] * a;
        mertens_ *= 1 - 1 / static_cast<Real>(p_);
        ++count_;
        p_ = stream_.next();
    }

    [[nodiscard]] SymmetricCoeffs snapshot() const { return {p_, kmax_, e_, count_, mertens_}; }

private:
    std::size_t kmax_;
    std::vector<Real> e_;
    Real mertens_ = 1;
    std::size_t count_ = 0;
    PrimeStream stream_;
    std::uint64_t p_ = 2;
};

[[nodiscard]] inline SymmetricCoeffs s_coeffs(std::uint64_t p, std::size_t kmax) {
    if (!is_prime_u64(p)) throw DomainError("s_coeffs: " + std::to_string(p) + " is not prime");
    LocalLawSweep sweep(kmax);
    while (sweep.prime() < p) sweep.advance();
    return sweep.snapshot();
}

/// Density of the integers whose k-th smallest distinct prime factor is p.
[[nodiscard]] inline Real lambda_kp(std::size_t k, std::uint64_t p) {
    if (k == 0) throw DomainError("lambda_kp requires k >= 1");
    const SymmetricCoeffs s = s_coeffs(p, k - 1);
    return s.mertens * s.e[k - 1] / static_cast<Real>(p);
}

/// Exact s_j(p) for j <= kmax over the rationals (practical for p <= ~10^4).
[[nodiscard]] inline std::vector<Rational> s_coeffs_exact(std::uint64_t p, std::size_t kmax) {
    if (!is_prime_u64(p)) throw DomainError("s_coeffs_exact: " + std::to_string(p) + " is not prime");
    std::vector<Rational> e(kmax + 1, Rational(0));
    e[0] = 1;
    std::size_t count = 0;
    for (std::uint64_t q : primes_up_to(p - 1)) {
        const Rational a(1, q - 1);
        for (std::size_t j = std::min(kmax, count + 1); j >= 1; --j) e[j] += e[j - 1] * a;
        ++count;
    }
    return e;
}

[[nodiscard]] inline Rational lambda_kp_exact(std::size_t k, std::uint64_t p) {
    if (k == 0) throw DomainError("lambda_kp_exact requires k >= 1");
    const auto e = s_coeffs_exact(p, k - 1);
    Rational mertens(1);
    for (std::uint64_t q : primes_up_to(p - 1)) mertens *= Rational(q - 1, q);
    return mertens * e[k - 1] / p;
}

struct LocalLawRow {
    std::size_t k = 1;
    std::vector<std::pair<std::uint64_t, Real>> entries;  ///< (p, lambda_k(p)) for p <= P
    Real partial_sum = 0;
    /// prod_{p<=P}(1 - 1/p) sum_{j<k} e_j(primes <= P): density of integers with
    /// fewer than k distinct prime factors <= P. partial_sum + tail == 1.
    Real tail = 0;

    [[nodiscard]] Real identity_residual() const { return partial_sum + tail - 1; }
};

[[nodiscard]] inline LocalLawRow lambda_row(std::size_t k, std::uint64_t P) {
    if (k == 0) throw DomainError("lambda_row requires k >= 1");
    if (P < 2) throw DomainError("lambda_row requires P >= 2");
    LocalLawRow row;
    row.k = k;
    LocalLawSweep sweep(k - 1);
    while (sweep.prime() <= P) {
        const Real lam = sweep.lambda(k);
        row.entries.emplace_back(sweep.prime(), lam);
        row.partial_sum += lam;
        sweep.advance();
    }
    Real s = 0;
    for (std::size_t j = 0; j < k; ++j) s += sweep.e()[j];
    row.tail = sweep.mertens() * s;
    return row;
}

struct MedianPrime {
    std::size_t k = 1;
    /// Smallest prime at which sum_{p' <= p} lambda_k(p') exceeds 1/2.
    std::uint64_t prime = 2;
    /// Largest prime whose cumulative mass is strictly below 1/2, if any.
    std::optional<std::uint64_t> strict_prime;
    Real cumulative = 0;       ///< cumulative mass at `prime`
    bool exact_tie = false;    ///< some prime before `prime` carries cumulative mass exactly 1/2
    bool tie_checked = false;  ///< a near-tie was adjudicated in exact arithmetic
};

/// Median of the distribution of the k-th prime factor: the first prime where
/// the cumulative mass passes 1/2, a mass of exactly 1/2 not counting as
/// passed. Comparisons within 1e-9 of 1/2 are redone over the rationals.
[[nodiscard]] inline MedianPrime median_prime(std::size_t k, std::uint64_t max_prime = 100'000'000ULL,
                                              std::uint64_t exact_tie_limit = 20'000) {
    if (k == 0) throw DomainError("median_prime requires k >= 1");
    MedianPrime out;
    out.k = k;
    LocalLawSweep sweep(k - 1);
    Real cum = 0;
    const Real half = 0.5L, eps = 1e-9L;
    while (true) {
        const std::uint64_t p = sweep.prime();
        if (p > max_prime) throw ResourceError("median_prime: exceeded prime bound " + std::to_string(max_prime));
        cum += sweep.lambda(k);
        int cmp = cum < half ? -1 : (cum > half ? 1 : 0);  // sign of (cumulative - 1/2)
        if (std::abs(cum - half) < eps && p <= exact_tie_limit) {
            Rational exact_cum(0);
            for (std::uint64_t q : primes_up_to(p)) exact_cum += lambda_kp_exact(k, q);
            out.tie_checked = true;
            cmp = exact_cum < Rational(1, 2) ? -1 : (exact_cum > Rational(1, 2) ? 1 : 0);
        }
        if (cmp > 0) {
            out.prime = p;
            out.cumulative = cum;
            return out;
        }
        if (cmp < 0) out.strict_prime = p;
        else out.exact_tie = true;
        sweep.advance();
    }
}

/// Standard normal distribution function.
[[nodiscard]] inline double gaussian_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Second-order correction e^{-z^2/2} (1/3 + A - z^2/3) to the local law.
[[nodiscard]] inline double phi0_correction(double z, double mertens_A) noexcept {
    return std::exp(-0.5 * z * z) * (1.0 / 3.0 + mertens_A - z * z / 3.0);
}

struct LambdaMode {
    std::size_t k = 1;
    Real lambda = 0;
};

/// argmax_k lambda_k(p), ties toward the smaller k.
[[nodiscard]] inline LambdaMode lambda_mode(std::uint64_t p) {
    if (!is_prime_u64(p)) throw DomainError("lambda_mode: " + std::to_string(p) + " is not prime");
    const std::size_t n = primes_up_to(p - 1).size();
    const SymmetricCoeffs s = s_coeffs(p, n);
    std::size_t best = 0;
    for (std::size_t j = 1; j <= n; ++j)
        if (s.e[j] > s.e[best]) best = j;
    return {best + 1, s.mertens * s.e[best] / static_cast<Real>(p)};
}

/// True iff a sequence rises (weakly) to a single mode and then falls (weakly).
template <class Seq>
[[nodiscard]] bool is_unimodal(const Seq& v) {
    std::size_t i = 1;
    while (i < v.size() && v[i] >= v[i - 1]) ++i;
    while (i < v.size() && v[i] <= v[i - 1]) ++i;
    return i >= v.size();
}

[[nodiscard]] inline bool unimodal_check(std::uint64_t p) {
    if (!is_prime_u64(p)) throw DomainError("unimodal_check: " + std::to_string(p) + " is not prime");
    const std::size_t n = primes_up_to(p - 1).size();
    // lambda_k(p) is a positive multiple of e_{k-1}
    return is_unimodal(s_coeffs(p, n).e);
}

/// Distribution of "d is the k-th divisor" over one period L = lcm(1..d):
/// counts[k] residues n mod L have d_k(n) = d.
struct DivisorLaw {
    std::uint64_t d = 1;
    std::uint64_t period = 1;
    std::vector<std::uint64_t> counts;  ///< index k = 0..d

    [[nodiscard]] Rational density(std::size_t k) const {
        if (k >= counts.size()) return Rational(0);
        return Rational(counts[k], period);
    }
};

inline constexpr std::uint64_t kExactPeriodMaxD = 20;

namespace detail {

/// m | d t  <=>  (m / gcd(m, d)) | t, for m < d.
[[nodiscard]] inline std::vector<std::uint64_t> reduced_moduli(std::uint64_t d) {
    std::vector<std::uint64_t> q;
    for (std::uint64_t m = 1; m < d; ++m) q.push_back(m / std::gcd(m, d));
    return q;
}

}  // namespace detail

[[nodiscard]] inline DivisorLaw exact_divisor_law(std::uint64_t d, unsigned threads = 0) {
    if (d == 0) throw DomainError("exact_divisor_law requires d >= 1");
    if (d > kExactPeriodMaxD) throw ResourceError("exact-period divisor law limited to d <= 20");
    std::uint64_t L = 1;
    for (std::uint64_t m = 2; m <= d; ++m) L = std::lcm(L, m);
    const auto q = detail::reduced_moduli(d);
    using Counts = std::vector<std::uint64_t>;
    Counts counts = chunked_reduce(
        0, L / d, 1u << 20, threads, Counts(d + 1, 0),
        [&](std::uint64_t lo, std::uint64_t hi) {
            Counts c(d + 1, 0);
            std::vector<std::uint64_t> r(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) r[i] = lo % q[i];
            for (std::uint64_t t = lo; t < hi; ++t) {
                std::size_t k = 1;
                for (std::size_t i = 0; i < q.size(); ++i) {
                    k += r[i] == 0;
                    if (++r[i] == q[i]) r[i] = 0;
                }
                ++c[k];
            }
            return c;
        },
        [](Counts a, Counts b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
            return a;
        });
    return {d, L, std::move(counts)};
}

struct LambdaOptions {
    enum class Route { automatic, exact, monte_carlo };
    Route route = Route::automatic;
    std::uint64_t samples = 1'000'000;
    std::optional<std::uint64_t> seed;
    double z = 3.890592;  ///< two-sided 99.99% normal quantile for the Wilson bracket
    unsigned threads = 0;
};

/// Wilson score interval for `hits` successes out of `n`.
[[nodiscard]] inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double centre = (ph + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn));
    return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == n ? 1.0 : std::min(1.0, centre + half)};
}

namespace detail {

inline const DivisorLaw& memo_divisor_law(std::uint64_t d, unsigned threads) {
    static std::mutex mu;
    static std::map<std::uint64_t, DivisorLaw> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, exact_divisor_law(d, threads)).first;
    return it->second;
}

}  // namespace detail

/// Density of the integers whose k-th smallest divisor is d. Exact over one
/// period for d <= 20; otherwise sampled as n = d t with t uniform 64-bit,
/// which makes the conditional frequency unbiased up to 2^-64 effects.
[[nodiscard]] inline DensityEstimate Lambda_kd(std::size_t k, std::uint64_t d, const LambdaOptions& opt = {}) {
    if (k == 0 || d == 0) throw DomainError("Lambda_kd requires k >= 1 and d >= 1");
    const bool exact = opt.route == LambdaOptions::Route::exact ||
                       (opt.route == LambdaOptions::Route::automatic && d <= kExactPeriodMaxD);
    if (exact) {
        const DivisorLaw& law = detail::memo_divisor_law(d, opt.threads);
        return DensityEstimate::from_exact(law.density(k), Method{MethodKind::exact_period, law.period});
    }
    if (!opt.seed) throw DomainError("Monte Carlo Lambda_kd requires an explicit seed");
    if (opt.samples == 0) throw DomainError("Monte Carlo Lambda_kd requires samples >= 1");
    const auto q = detail::reduced_moduli(d);
    const std::uint64_t seed = *opt.seed;
    const std::uint64_t hits = chunked_reduce(
        0, opt.samples, 1u << 16, opt.threads, std::uint64_t{0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::uint64_t h = 0;
            for (std::uint64_t i = lo; i < hi; ++i) {
                const std::uint64_t t = CounterRng::at(seed, i);
                std::size_t c = 1;
                for (std::uint64_t m : q) c += t % m == 0;
                h += c == k;
            }
            return h;
        },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    const auto [lo, hi] = wilson_interval(hits, opt.samples, opt.z);
    const double scale = 1.0 / static_cast<double>(d);
    DensityEstimate est = DensityEstimate::bracketed(lo * scale, hi * scale,
                                                     Method{MethodKind::monte_carlo, opt.samples, seed});
    est.point = static_cast<double>(hits) / static_cast<double>(opt.samples) * scale;
    return est;
}

struct KScales {
    std::uint64_t k = 0;
    std::vector<double> K;  ///< K[j] = k^{log_{j+2} k / log 2}
};

/// k-fold iterated natural logarithm; NaN once an argument is non-positive.
[[nodiscard]] inline double iterated_log(double x, int times) noexcept {
    for (int i = 0; i < times; ++i) x = x > 0 ? std::log(x) : std::nan("");
    return x;
}

[[nodiscard]] inline KScales k_scales(std::uint64_t k, std::size_t jmax) {
    KScales out{k, {}};
    const double lk = std::log(static_cast<double>(k));
    for (std::size_t j = 0; j <= jmax; ++j) {
        const double it = iterated_log(static_cast<double>(k), static_cast<int>(j) + 2);
        if (!(it > 0)) throw DomainError("k_scales: iterated log of order " + std::to_string(j + 2) + " is not positive");
        out.K.push_back(std::exp(lk * it / std::log(2.0)));
    }
    return out;
}

}  // namespace divilab

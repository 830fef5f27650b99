#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "density.hpp"
#include "divisor_geometry.hpp"
#include "error.hpp"
#include "local_laws.hpp"
#include "multiples.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "quadrature.hpp"
#include "sieve.hpp"

namespace divilab {

inline constexpr std::uint64_t kScanChunk = 1u << 16;

namespace detail {

inline void require_sieve(const SpfSieve& sieve, std::uint64_t x, const char* what) {
    if (x > sieve.limit()) {
        throw OutOfRangeError(std::string(what) + ": x = " + std::to_string(x) + " exceeds sieve limit " +
                              std::to_string(sieve.limit()));
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// H(x, y, z), T(x), s(x)

/// H(x, y, z): n <= x with a divisor in (y, z] (or [y, z] when closed_left).
[[nodiscard]] inline std::uint64_t h_count(std::uint64_t x, std::uint64_t y, std::uint64_t z, bool closed_left = false,
                                           unsigned threads = 1) {
    if (!(y < z)) throw DomainError("h_count requires y < z");
    if (z > x) throw DomainError("h_count requires z <= x");
    const GeneratorSet A = closed_left ? GeneratorSet::closed(std::max<std::uint64_t>(y, 1), z) : GeneratorSet::interval(y, z);
    return multiples_count(A, x, threads);
}

struct TSum {
    std::uint64_t direct = 0;
    std::optional<std::uint64_t> dyadic;
};

/// T(x) = sum_{n <= x} tau+(n), directly and (optionally) as
/// sum_{k >= -1} H(x, 2^k, 2^{k+1}), the k = -1 cell holding d = 1.
[[nodiscard]] inline TSum t_sum(std::uint64_t x, const SpfSieve& sieve, bool cross_check = true, unsigned threads = 1) {
    if (x == 0) throw DomainError("t_sum requires x >= 1");
    detail::require_sieve(sieve, x, "t_sum");
    TSum r;
    r.direct = chunked_reduce(
        1, x + 1, kScanChunk, threads, std::uint64_t{0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            SpectrumBuilder sb(sieve);
            std::uint64_t s = 0;
            for (std::uint64_t n = lo; n < hi; ++n) s += tau_plus(sb.build(n));
            return s;
        },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    if (cross_check) {
        std::uint64_t s = x;  // k = -1: every n has the divisor 1
        for (std::uint64_t lo = 1; lo < x; lo *= 2) {
            s += multiples_count(GeneratorSet::interval(lo, std::min(2 * lo, x)), x, threads);
        }
        r.dyadic = s;
    }
    return r;
}

/// s(x) = (1/x) sum_{n <= x} Delta(n).
[[nodiscard]] inline double s_avg(std::uint64_t x, const SpfSieve& sieve, unsigned threads = 1) {
    if (x == 0) throw DomainError("s_avg requires x >= 1");
    detail::require_sieve(sieve, x, "s_avg");
    const std::uint64_t total = chunked_reduce(
        1, x + 1, kScanChunk, threads, std::uint64_t{0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            SpectrumBuilder sb(sieve);
            std::uint64_t s = 0;
            for (std::uint64_t n = lo; n < hi; ++n) s += delta(sb.build(n));
            return s;
        },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    return static_cast<double>(total) / static_cast<double>(x);
}

// ---------------------------------------------------------------------------
// eps(y, z), eps_1(y, z), rho_1

struct EpsPair {
    DensityEstimate eps;
    DensityEstimate eps1;
    double rho1 = 0;
};

/// Density of integers with a divisor in (y, z], with exactly one such
/// divisor, and their ratio. Exact when (y, z] holds at most 24 integers.
[[nodiscard]] inline EpsPair eps_pair(std::uint64_t y, std::uint64_t z, std::uint64_t x, unsigned threads = 1) {
    if (!(y < z)) throw DomainError("eps_pair requires y < z");
    if (z > x) throw DomainError("eps_pair requires z <= x");
    const GeneratorSet A = GeneratorSet::interval(y, z);
    EpsPair r;
    if (A.size() <= 24) {
        const auto e = density_bracket(A);
        const auto e1 = exactly_one_density(A);
        if (e.is_exact() && e1) {
            r.eps = e;
            r.eps1 = DensityEstimate::from_exact(*e1);
            if (*e.exact == 0) throw DomainError("eps(y, z) = 0: rho_1 undefined");
            r.rho1 = to_double(*e1 / *e.exact);
            return r;
        }
    }
    using Pair = std::pair<std::uint64_t, std::uint64_t>;
    const Pair c = chunked_reduce(
        1, x + 1, kSegment, threads, Pair{0, 0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::vector<std::uint8_t> h;
            divisor_hits(A, lo, hi, h);
            Pair p{0, 0};
            for (std::uint8_t v : h) {
                p.first += v != 0;
                p.second += v == 1;
            }
            return p;
        },
        [](Pair a, Pair b) { return Pair{a.first + b.first, a.second + b.second}; });
    if (c.first == 0) throw DomainError("eps(y, z) = 0: rho_1 undefined");
    const double xd = static_cast<double>(x);
    r.eps = DensityEstimate::empirical(static_cast<double>(c.first) / xd, Method{MethodKind::sieve_count, x});
    r.eps1 = DensityEstimate::empirical(static_cast<double>(c.second) / xd, Method{MethodKind::sieve_count, x});
    r.rho1 = static_cast<double>(c.second) / static_cast<double>(c.first);
    return r;
}

// ---------------------------------------------------------------------------
// Empirical distributions

struct EmpiricalDistribution {
    std::uint64_t samples = 0;
    std::vector<double> grid;
    std::vector<double> cdf;
    std::optional<std::pair<std::string, double>> ks_vs;

    /// Empirical CDF at the largest grid point <= z (0 below the grid).
    [[nodiscard]] double at(double z) const {
        const auto it = std::upper_bound(grid.begin(), grid.end(), z);
        return it == grid.begin() ? 0.0 : cdf[static_cast<std::size_t>(it - grid.begin()) - 1];
    }
};

/// Empirical distribution of tau+(n)/tau(n) over n <= x, evaluated on `grid`
/// (ascending; 1 is appended when missing so the CDF ends at 1).
[[nodiscard]] inline EmpiricalDistribution nu_distribution(std::uint64_t x, std::vector<double> grid, const SpfSieve& sieve,
                                                           unsigned threads = 1) {
    if (x == 0) throw DomainError("nu_distribution requires x >= 1");
    detail::require_sieve(sieve, x, "nu_distribution");
    std::sort(grid.begin(), grid.end());
    if (grid.empty() || grid.back() < 1.0) grid.push_back(1.0);
    using Counts = std::vector<std::uint64_t>;
    const Counts counts = chunked_reduce(
        1, x + 1, kScanChunk, threads, Counts(grid.size(), 0),
        [&](std::uint64_t lo, std::uint64_t hi) {
            Counts c(grid.size(), 0);
            SpectrumBuilder sb(sieve);
            for (std::uint64_t n = lo; n < hi; ++n) {
                const auto& s = sb.build(n);
                const double ratio = static_cast<double>(tau_plus(s)) / static_cast<double>(s.tau());
                const auto it = std::lower_bound(grid.begin(), grid.end(), ratio);
                if (it != grid.end()) ++c[static_cast<std::size_t>(it - grid.begin())];
            }
            return c;
        },
        [](Counts a, Counts b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
            return a;
        });
    EmpiricalDistribution d;
    d.samples = x;
    d.grid = std::move(grid);
    std::uint64_t acc = 0;
    for (std::uint64_t c : counts) {
        acc += c;
        d.cdf.push_back(static_cast<double>(acc) / static_cast<double>(x));
    }
    return d;
}

/// Fraction of n <= x with tau+(n)/tau(n) > 1 - eta.
[[nodiscard]] inline double nu_upper_mass(std::uint64_t x, double eta, const SpfSieve& sieve, unsigned threads = 1) {
    const auto d = nu_distribution(x, {1.0 - eta, 1.0}, sieve, threads);
    return 1.0 - d.cdf[0];
}

// ---------------------------------------------------------------------------
// P+ adjacency

struct PplusStats {
    std::uint64_t x = 0;
    double frac_up = 0;           ///< #{n <= x : P+(n+1) > P+(n)} / x
    double frac_triple_down = 0;  ///< #{n <= x : P+(n) > P+(n+1) > P+(n+2)} / x
    std::optional<std::uint64_t> first_triple_down;
    double hist_lo = -1, hist_hi = 1;
    std::vector<std::uint64_t> alpha_hist;  ///< log(P+(n+1)/P+(n))/log n, 2 <= n <= x
    std::vector<double> alphas;
    std::vector<double> frac_exceeding;  ///< #{n : P+(n+1) > P+(n) n^alpha} / x per alpha
};

[[nodiscard]] inline PplusStats pplus_adjacency(std::uint64_t x, const SpfSieve& sieve, std::vector<double> alphas = {},
                                                std::size_t bins = 40, unsigned threads = 1) {
    if (x == 0) throw DomainError("pplus_adjacency requires x >= 1");
    detail::require_sieve(sieve, x + 2, "pplus_adjacency");
    struct Part {
        std::uint64_t up = 0, down3 = 0;
        std::optional<std::uint64_t> first;
        std::vector<std::uint64_t> hist, exceed;
    };
    PplusStats out;
    out.x = x;
    out.alphas = alphas;
    const double width = (out.hist_hi - out.hist_lo) / static_cast<double>(bins);
    const Part total = chunked_reduce(
        1, x + 1, kScanChunk, threads, Part{},
        [&](std::uint64_t lo, std::uint64_t hi) {
            Part p;
            p.hist.assign(bins, 0);
            p.exceed.assign(alphas.size(), 0);
            std::uint64_t a = sieve.largest_prime_factor(lo), b = sieve.largest_prime_factor(lo + 1);
            for (std::uint64_t n = lo; n < hi; ++n) {
                const std::uint64_t c = sieve.largest_prime_factor(n + 2);
                if (b > a) ++p.up;
                if (a > b && b > c) {
                    ++p.down3;
                    if (!p.first) p.first = n;
                }
                if (n >= 2) {
                    const double ln = std::log(static_cast<double>(n));
                    const double al = std::log(static_cast<double>(b) / static_cast<double>(a)) / ln;
                    const auto bin = static_cast<long>(std::floor((al - out.hist_lo) / width));
                    ++p.hist[static_cast<std::size_t>(std::clamp<long>(bin, 0, static_cast<long>(bins) - 1))];
                    for (std::size_t i = 0; i < alphas.size(); ++i)
                        if (std::log(static_cast<double>(b)) > std::log(static_cast<double>(a)) + alphas[i] * ln) ++p.exceed[i];
                }
                a = b;
                b = c;
            }
            return p;
        },
        [&](Part acc, Part p) {
            if (acc.hist.empty()) {
                acc.hist.assign(bins, 0);
                acc.exceed.assign(alphas.size(), 0);
            }
            acc.up += p.up;
            acc.down3 += p.down3;
            if (!acc.first) acc.first = p.first;
            for (std::size_t i = 0; i < bins; ++i) acc.hist[i] += p.hist[i];
            for (std::size_t i = 0; i < alphas.size(); ++i) acc.exceed[i] += p.exceed[i];
            return acc;
        });
    const double xd = static_cast<double>(x);
    out.frac_up = static_cast<double>(total.up) / xd;
    out.frac_triple_down = static_cast<double>(total.down3) / xd;
    out.first_triple_down = total.first;
    out.alpha_hist = total.hist;
    for (std::uint64_t e : total.exceed) out.frac_exceeding.push_back(static_cast<double>(e) / xd);
    return out;
}

/// log(1/(1-c)) - 2 int_0^c log((1-v)/(1-v-2c)) dv/(1-v), for 0 < c < 1/5.
[[nodiscard]] inline double lower_bound_integral(double c, double tol = 1e-12) {
    if (!(c > 0.0 && c < 0.2)) throw DomainError("lower_bound_integral requires 0 < c < 1/5");
    const double integral = integrate(
        [c](double v) { return std::log((1 - v) / (1 - v - 2 * c)) / (1 - v); }, 0.0, c, tol);
    return -std::log1p(-c) - 2 * integral;
}

/// Maximiser (c*, value) of lower_bound_integral over (0, 1/5).
[[nodiscard]] inline std::pair<double, double> maximize_lower_bound() {
    return golden_section_max([](double c) { return lower_bound_integral(c); }, 1e-9, 0.2 - 1e-9, 1e-10);
}

// ---------------------------------------------------------------------------
// Erdos-Kac

struct ErdosKacResult {
    EmpiricalDistribution dist;       ///< CDF of (omega(n) - log log x)/sqrt(log log x), 3 <= n <= x
    std::vector<std::uint64_t> counts;  ///< counts[k] = #{n : omega(n) = k}
    std::uint32_t median = 0;
    double ks = 0;
};

[[nodiscard]] inline ErdosKacResult erdos_kac(std::uint64_t x, const SpfSieve& sieve, bool use_big_omega = false,
                                             unsigned threads = 1) {
    if (x < 3) throw DomainError("erdos_kac requires x >= 3");
    detail::require_sieve(sieve, x, "erdos_kac");
    using Counts = std::vector<std::uint64_t>;
    Counts counts = chunked_reduce(
        3, x + 1, kScanChunk, threads, Counts(64, 0),
        [&](std::uint64_t lo, std::uint64_t hi) {
            Counts c(64, 0);
            for (std::uint64_t n = lo; n < hi; ++n) {
                std::uint64_t m = n, last = 0;
                std::uint32_t k = 0;
                while (m > 1) {
                    const std::uint64_t p = sieve.spf_unchecked(m);
                    if (use_big_omega || p != last) ++k;
                    last = p;
                    m /= p;
                }
                ++c[k];
            }
            return c;
        },
        [](Counts a, Counts b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
            return a;
        });
    while (counts.size() > 1 && counts.back() == 0) counts.pop_back();
    ErdosKacResult r;
    const double L = std::log(std::log(static_cast<double>(x)));
    const double s = std::sqrt(L);
    const std::uint64_t total = x - 2;
    std::uint64_t acc = 0;
    bool median_set = false;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        const double z = (static_cast<double>(k) - L) / s;
        const double before = static_cast<double>(acc) / static_cast<double>(total);
        acc += counts[k];
        const double after = static_cast<double>(acc) / static_cast<double>(total);
        const double g = gaussian_cdf(z);
        r.ks = std::max({r.ks, std::abs(after - g), std::abs(before - g)});
        r.dist.grid.push_back(z);
        r.dist.cdf.push_back(after);
        if (!median_set && 2 * acc >= total) {
            r.median = static_cast<std::uint32_t>(k);
            median_set = true;
        }
    }
    r.dist.samples = total;
    r.dist.ks_vs = std::pair<std::string, double>{"gaussian", r.ks};
    r.counts = std::move(counts);
    return r;
}

struct OmegaMedianCount {
    std::uint64_t count = 0;
    double formula_gap = 0;  ///< (count - x/2) sqrt(2 pi L)/x + <L>, an empirical estimate of -C
};

/// #{n <= x : Omega(n) <= log log x}.
[[nodiscard]] inline OmegaMedianCount omega_median_count(std::uint64_t x, const SpfSieve& sieve, unsigned threads = 1) {
    if (x < 3) throw DomainError("omega_median_count requires x >= 3");
    detail::require_sieve(sieve, x, "omega_median_count");
    const double L = std::log(std::log(static_cast<double>(x)));
    const std::uint64_t count = chunked_reduce(
        1, x + 1, kScanChunk, threads, std::uint64_t{0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::uint64_t c = 0;
            for (std::uint64_t n = lo; n < hi; ++n) {
                std::uint64_t m = n;
                std::uint32_t k = 0;
                while (m > 1) {
                    m /= sieve.spf_unchecked(m);
                    ++k;
                }
                c += static_cast<double>(k) <= L;
            }
            return c;
        },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    const double xd = static_cast<double>(x);
    const double frac = L - std::floor(L);
    return {count, (static_cast<double>(count) - xd / 2) * std::sqrt(2 * std::numbers::pi * L) / xd + frac};
}

// ---------------------------------------------------------------------------
// Totient values

/// Number of distinct values v <= x of Euler's phi. Every n with phi(n) <= x
/// is built as a product of prime powers in ascending prime order, pruning
/// once the partial totient exceeds x.
[[nodiscard]] inline std::uint64_t totient_values(std::uint64_t x, std::uint64_t cap = 200'000'000ULL) {
    if (x == 0) throw DomainError("totient_values requires x >= 1");
    if (x > cap) throw ResourceError("totient_values: x exceeds cap");
    const auto primes = primes_up_to(x + 1);
    std::vector<bool> hit(x + 1, false);
    auto rec = [&](auto&& self, std::size_t idx, std::uint64_t phi) -> void {
        hit[phi] = true;
        for (std::size_t i = idx; i < primes.size(); ++i) {
            const std::uint64_t p = primes[i];
            if (phi > x / (p - 1)) break;
            std::uint64_t v = phi * (p - 1);
            while (true) {
                self(self, i + 1, v);
                if (v > x / p) break;
                v *= p;
            }
        }
    };
    rec(rec, 0, 1);
    return static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), true));
}

// ---------------------------------------------------------------------------
// min_{d | n} ||d theta||

/// Distance to the nearest integer.
[[nodiscard]] inline long double dist_to_int(long double t) noexcept {
    const long double f = t - std::floor(t);
    return std::min(f, 1.0L - f);
}

[[nodiscard]] inline long double dtheta_min(const DivisorSpectrum& spec, long double theta) {
    long double best = 1;
    for (std::uint64_t d : spec.divisors) best = std::min(best, dist_to_int(static_cast<long double>(d) * theta));
    return best;
}

/// Median of log(1/min_{d|n} ||d theta||)/log tau(n) over lo <= n < hi with
/// tau(n) >= 2 and a non-zero minimum.
[[nodiscard]] inline double dtheta_statistic_median(long double theta, std::uint64_t lo, std::uint64_t hi,
                                                    const SpfSieve& sieve) {
    detail::require_sieve(sieve, hi, "dtheta_statistic_median");
    SpectrumBuilder sb(sieve);
    std::vector<double> v;
    for (std::uint64_t n = lo; n < hi; ++n) {
        const auto& s = sb.build(n);
        if (s.tau() < 2) continue;
        const long double m = dtheta_min(s, theta);
        if (m <= 0) continue;
        v.push_back(static_cast<double>(std::log(1 / m) / std::log(static_cast<long double>(s.tau()))));
    }
    if (v.empty()) throw DomainError("dtheta_statistic_median: empty range");
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

struct Convergent {
    u128 p;
    u128 q;
};

/// Convergents p_j/q_j of [a_0; a_1, a_2, ...].
[[nodiscard]] inline std::vector<Convergent> convergents(std::span<const std::uint64_t> cf) {
    std::vector<Convergent> out;
    u128 p0 = 1, q0 = 0, p1 = 0, q1 = 1;
    for (std::uint64_t a : cf) {
        constexpr u128 top = ~u128{0};
        if (a && (p0 > (top - p1) / a || q0 > (top - q1) / a)) throw ResourceError("convergent overflow");
        const u128 p = a * p0 + p1, q = a * q0 + q1;
        out.push_back({p, q});
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
    }
    return out;
}

/// Continued fraction of a real, stopping after J terms or once
/// |theta - p_j/q_j| < 1/q_j^2 drops below the working precision.
[[nodiscard]] inline std::vector<std::uint64_t> continued_fraction(long double theta, std::size_t J) {
    std::vector<std::uint64_t> cf;
    const long double eps = 4 * std::numeric_limits<long double>::epsilon() * std::max(1.0L, std::fabs(theta));
    long double q0 = 1, q1 = 0;
    for (std::size_t j = 0; j < J; ++j) {
        const long double a = std::floor(theta);
        if (a < 0 || a > 1e18L) break;
        cf.push_back(static_cast<std::uint64_t>(a));
        const long double q = a * q0 + q1;
        q1 = q0;
        q0 = q;
        const long double frac = theta - a;
        if (frac < 1e-15L || q * q * eps > 1) break;
        theta = 1 / frac;
    }
    return cf;
}

/// log q_{j+1} / log q_j for consecutive convergents with q_j >= 2.
[[nodiscard]] inline std::vector<double> convergent_growth(const std::vector<Convergent>& c) {
    std::vector<double> out;
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
        if (c[j].q < 2) continue;
        out.push_back(std::log(static_cast<double>(c[j + 1].q)) / std::log(static_cast<double>(c[j].q)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exceptions to M(E)

/// Counts of n <= x_i that are not in M(E), for ascending checkpoints x_i.
[[nodiscard]] inline std::vector<std::uint64_t> exceptional_profile(std::span<const std::uint64_t> checkpoints,
                                                                    const SpfSieve& sieve, unsigned threads = 1) {
    if (checkpoints.empty()) return {};
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) throw DomainError("checkpoints must ascend");
    const std::uint64_t x = checkpoints.back();
    detail::require_sieve(sieve, x, "exceptional_profile");
    using Counts = std::vector<std::uint64_t>;
    return chunked_reduce(
        1, x + 1, kScanChunk, threads, Counts(checkpoints.size(), 0),
        [&](std::uint64_t lo, std::uint64_t hi) {
            Counts c(checkpoints.size(), 0);
            SpectrumBuilder sb(sieve);
            for (std::uint64_t n = lo; n < hi; ++n) {
                if (in_ME(sb.build(n))) continue;
                const auto first = std::lower_bound(checkpoints.begin(), checkpoints.end(), n);
                ++c[static_cast<std::size_t>(first - checkpoints.begin())];
            }
            return c;
        },
        [](Counts a, Counts b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
            return a;
        });
}

[[nodiscard]] inline std::uint64_t exceptional_count(std::uint64_t x, const SpfSieve& sieve, unsigned threads = 1) {
    const std::uint64_t cp[] = {x};
    return exceptional_profile(cp, sieve, threads)[0];
}

/// Cumulative form of exceptional_profile: entry i counts all n <= x_i.
[[nodiscard]] inline std::vector<std::uint64_t> exceptional_counts(std::span<const std::uint64_t> checkpoints,
                                                                   const SpfSieve& sieve, unsigned threads = 1) {
    auto c = exceptional_profile(checkpoints, sieve, threads);
    for (std::size_t i = 1; i < c.size(); ++i) c[i] += c[i - 1];
    return c;
}

/// R(x) = T(x) (log log x)^{3/2} / (x (log x)^{1 - delta}).
[[nodiscard]] inline double t_ratio(std::uint64_t x, std::uint64_t t_value) {
    const double l2 = std::numbers::ln2;
    const double delta = 1 - (1 + std::log(l2)) / l2;
    const double lx = std::log(static_cast<double>(x));
    return static_cast<double>(t_value) * std::pow(std::log(lx), 1.5) / (static_cast<double>(x) * std::pow(lx, 1 - delta));
}

}  // namespace divilab

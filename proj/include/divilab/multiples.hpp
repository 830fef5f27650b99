#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "density.hpp"
#include "error.hpp"
#include "ext_nat.hpp"
#include "parallel.hpp"
#include "primes.hpp"

namespace divilab {

using u128 = unsigned __int128;

/// Finite generator set A, strictly ascending naturals >= 1.
class GeneratorSet {
public:
    GeneratorSet() = default;

    [[nodiscard]] static GeneratorSet of(std::vector<std::uint64_t> elems) {
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        if (!elems.empty() && elems.front() == 0) throw DomainError("generators must be >= 1");
        GeneratorSet g;
        g.elems_ = std::move(elems);
        return g;
    }

    /// Integers in the half-open interval (y, z].
    [[nodiscard]] static GeneratorSet interval(std::uint64_t y, std::uint64_t z) {
        if (z < y) throw DomainError("interval (y, z] requires y <= z");
        std::vector<std::uint64_t> v;
        v.reserve(z - y);
        for (std::uint64_t a = y + 1; a <= z; ++a) v.push_back(a);
        return of(std::move(v));
    }

    /// Integers in the closed interval [a, b].
    [[nodiscard]] static GeneratorSet closed(std::uint64_t a, std::uint64_t b) {
        if (a == 0) throw DomainError("closed interval must start at >= 1");
        return interval(a - 1, b);
    }

    [[nodiscard]] const std::vector<std::uint64_t>& elements() const noexcept { return elems_; }
    [[nodiscard]] std::size_t size() const noexcept { return elems_.size(); }
    [[nodiscard]] bool empty() const noexcept { return elems_.empty(); }
    [[nodiscard]] std::uint64_t max() const noexcept { return elems_.empty() ? 0 : elems_.back(); }
    [[nodiscard]] bool contains(std::uint64_t v) const noexcept {
        return std::binary_search(elems_.begin(), elems_.end(), v);
    }

    /// Drops every element having a proper divisor in the set; M(A) is unchanged.
    [[nodiscard]] GeneratorSet primitive() const {
        std::vector<std::uint64_t> kept;
        if (max() <= 100'000'000ULL) {
            std::vector<bool> covered(max() + 1, false);
            for (std::uint64_t a : elems_) {
                if (covered[a]) continue;
                kept.push_back(a);
                for (std::uint64_t m = a; m <= max(); m += a) covered[m] = true;
            }
        } else {
            for (std::uint64_t a : elems_) {
                if (std::none_of(kept.begin(), kept.end(), [a](std::uint64_t b) { return a % b == 0; })) kept.push_back(a);
            }
        }
        GeneratorSet g;
        g.elems_ = std::move(kept);
        return g;
    }

    [[nodiscard]] bool is_primitive() const { return primitive().size() == size(); }

    /// A cap [1, T].
    [[nodiscard]] GeneratorSet truncated(std::uint64_t T) const {
        GeneratorSet g;
        g.elems_.assign(elems_.begin(), std::upper_bound(elems_.begin(), elems_.end(), T));
        return g;
    }

    [[nodiscard]] GeneratorSet united(const GeneratorSet& other) const {
        std::vector<std::uint64_t> v = elems_;
        v.insert(v.end(), other.elems_.begin(), other.elems_.end());
        return of(std::move(v));
    }

    friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;

private:
    std::vector<std::uint64_t> elems_;
};

// ---------------------------------------------------------------------------
// Inclusion-exclusion over the lcm lattice

/// Aggregated subsets S with a common lcm: `sign_sum` = sum (-1)^{|S|+1},
/// `size_sum` = sum (-1)^{|S|+1} |S|.
struct LcmTerm {
    u128 lcm;
    std::int64_t sign_sum;
    std::int64_t size_sum;
};

struct IeLimits {
    std::size_t max_generators = 24;
    std::size_t max_terms = 1u << 22;
};

[[nodiscard]] inline std::optional<u128> lcm_u128(u128 a, std::uint64_t b) noexcept {
    u128 x = a, y = b;
    while (y) {
        const u128 t = x % y;
        x = y;
        y = t;
    }
    const u128 q = a / x;
    if (q != 0 && b > (~u128{0} >> 1) / q) return std::nullopt;  // keep below 2^127
    return q * b;
}

/// Terms of the lcm lattice of `elems`, or nullopt when an lcm exceeds 2^127
/// or the term count exceeds the cap. Systems with zero coefficients are
/// dropped since all their extensions vanish as well.
[[nodiscard]] inline std::optional<std::vector<LcmTerm>> lcm_lattice(std::span<const std::uint64_t> elems,
                                                                     const IeLimits& lim = {}) {
    if (elems.size() > lim.max_generators) return std::nullopt;
    std::vector<LcmTerm> terms;
    std::vector<LcmTerm> fresh;
    for (std::uint64_t a : elems) {
        fresh.clear();
        fresh.push_back({a, 1, 1});
        for (const auto& t : terms) {
            const auto l = lcm_u128(t.lcm, a);
            if (!l) return std::nullopt;
            fresh.push_back({*l, -t.sign_sum, -(t.size_sum + t.sign_sum)});
        }
        terms.insert(terms.end(), fresh.begin(), fresh.end());
        std::sort(terms.begin(), terms.end(), [](const LcmTerm& x, const LcmTerm& y) { return x.lcm < y.lcm; });
        std::size_t w = 0;
        for (std::size_t r = 0; r < terms.size();) {
            LcmTerm acc = terms[r++];
            while (r < terms.size() && terms[r].lcm == acc.lcm) {
                acc.sign_sum += terms[r].sign_sum;
                acc.size_sum += terms[r].size_sum;
                ++r;
            }
            if (acc.sign_sum != 0 || acc.size_sum != 0) terms[w++] = acc;
        }
        terms.resize(w);
        if (terms.size() > lim.max_terms) return std::nullopt;
    }
    return terms;
}

namespace detail {

[[nodiscard]] inline BigInt to_big(u128 v) {
    BigInt b = static_cast<std::uint64_t>(v >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(v);
    return b;
}

/// sum coeff(t) / t.lcm as an exact rational.
template <class Coeff>
[[nodiscard]] Rational lattice_sum(const std::vector<LcmTerm>& terms, Coeff coeff) {
    if (terms.empty()) return Rational(0);
    BigInt L = 1;
    for (const auto& t : terms) {
        const BigInt l = to_big(t.lcm);
        L = L / boost::multiprecision::gcd(L, l) * l;
    }
    BigInt num = 0;
    for (const auto& t : terms) {
        const std::int64_t c = coeff(t);
        if (c != 0) num += BigInt(c) * (L / to_big(t.lcm));
    }
    return Rational(num, L);
}

}  // namespace detail

/// Truncated inclusion-exclusion to `depth`: partial sums at odd depth bound
/// the union from above, at even depth from below.
[[nodiscard]] inline DensityEstimate bonferroni_bracket(const GeneratorSet& A, std::size_t depth) {
    if (depth == 0) throw DomainError("bonferroni depth must be >= 1");
    const auto& el = A.elements();
    std::vector<long double> S(depth + 1, 0.0L);
    std::uint64_t overflowed = 0;
    std::uint64_t terms = 0;
    // depth-first over subsets of size <= depth
    auto rec = [&](auto&& self, std::size_t start, std::size_t size, u128 l) -> void {
        for (std::size_t i = start; i < el.size(); ++i) {
            const auto nl = lcm_u128(l, el[i]);
            ++terms;
            if (!nl) {
                ++overflowed;
                continue;
            }
            S[size + 1] += 1.0L / static_cast<long double>(*nl);
            if (size + 1 < depth) self(self, i + 1, size + 1, *nl);
        }
        if (terms > 200'000'000ULL) throw ResourceError("bonferroni enumeration exceeds 2e8 subsets");
    };
    rec(rec, 0, 0, 1);
    // overflowed subsets (and their unexplored extensions) each weigh < 2^-126
    const long double slack = 1e-15L + static_cast<long double>(overflowed) * 0x1p-100L;
    long double lower = 0.0L, upper = 1.0L, partial = 0.0L;
    for (std::size_t j = 1; j <= depth; ++j) {
        partial += (j % 2 ? 1 : -1) * S[j];
        if (j % 2) upper = std::min(upper, partial + slack);
        else lower = std::max(lower, partial - slack);
    }
    if (depth >= el.size() && !overflowed) lower = upper = partial;  // complete expansion
    if (overflowed) upper = std::min(1.0L, upper + slack);
    return DensityEstimate::bracketed(static_cast<double>(lower), static_cast<double>(upper),
                                      Method{MethodKind::bonferroni, depth});
}

struct DensityOptions {
    IeLimits limits{};
    std::size_t fallback_depth = 4;
};

/// Natural density of M(A): exact over the lcm lattice when A (after
/// primitive reduction) is small enough, otherwise a Bonferroni bracket
/// flagged as a fallback.
[[nodiscard]] inline DensityEstimate density_bracket(const GeneratorSet& A, const DensityOptions& opt = {}) {
    const GeneratorSet P = A.primitive();
    if (P.empty()) return DensityEstimate::from_exact(Rational(0));
    if (P.elements().front() == 1) return DensityEstimate::from_exact(Rational(1));
    if (const auto terms = lcm_lattice(P.elements(), opt.limits)) {
        return DensityEstimate::from_exact(detail::lattice_sum(*terms, [](const LcmTerm& t) { return t.sign_sum; }));
    }
    DensityEstimate est = bonferroni_bracket(P, std::min(opt.fallback_depth, P.size()));
    est.fallback = true;
    return est;
}

/// Density of integers divisible by exactly one element of A (no primitive
/// reduction: every generator counts).
[[nodiscard]] inline std::optional<Rational> exactly_one_density(const GeneratorSet& A, const IeLimits& lim = {}) {
    if (A.empty()) return Rational(0);
    const auto terms = lcm_lattice(A.elements(), lim);
    if (!terms) return std::nullopt;
    return detail::lattice_sum(*terms, [](const LcmTerm& t) { return t.size_sum; });
}

// ---------------------------------------------------------------------------
// Sieve counts

inline constexpr std::uint64_t kSegment = 1u << 18;

/// counts[i] = #{a in A : a | lo + i} (saturating at 255) for n in [lo, hi).
inline void divisor_hits(const GeneratorSet& A, std::uint64_t lo, std::uint64_t hi, std::vector<std::uint8_t>& counts) {
    counts.assign(hi - lo, 0);
    for (std::uint64_t a : A.elements()) {
        if (a >= hi) break;
        for (std::uint64_t m = (lo + a - 1) / a * a; m < hi; m += a) {
            auto& c = counts[m - lo];
            if (c != 255) ++c;
        }
    }
}

/// |M(A) cap [1, x]|.
[[nodiscard]] inline std::uint64_t multiples_count(const GeneratorSet& A, std::uint64_t x, unsigned threads = 1,
                                                   std::uint64_t cap = 10'000'000'000ULL) {
    if (x > cap) throw ResourceError("multiples_count: x exceeds cap");
    return chunked_reduce(
        1, x + 1, kSegment, threads, std::uint64_t{0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::vector<std::uint8_t> c;
            divisor_hits(A, lo, hi, c);
            return static_cast<std::uint64_t>(std::count_if(c.begin(), c.end(), [](std::uint8_t v) { return v != 0; }));
        },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
}

[[nodiscard]] inline DensityEstimate sieve_density(const GeneratorSet& A, std::uint64_t x, unsigned threads = 1) {
    if (x == 0) throw DomainError("sieve_density requires x >= 1");
    return DensityEstimate::empirical(static_cast<double>(multiples_count(A, x, threads)) / static_cast<double>(x),
                                      Method{MethodKind::sieve_count, x});
}

/// Logarithmic density estimate (sum_{n <= x, n in M(A)} 1/n) / log x.
[[nodiscard]] inline DensityEstimate log_density(const GeneratorSet& A, std::uint64_t x, unsigned threads = 1,
                                                 std::uint64_t cap = 10'000'000'000ULL) {
    if (x < 2) throw DomainError("log_density requires x >= 2");
    if (x > cap) throw ResourceError("log_density: x exceeds cap");
    const long double sum = chunked_reduce(
        1, x + 1, kSegment, threads, 0.0L,
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::vector<std::uint8_t> c;
            divisor_hits(A, lo, hi, c);
            long double s = 0.0L;
            for (std::uint64_t n = hi; n-- > lo;)  // small terms first
                if (c[n - lo]) s += 1.0L / static_cast<long double>(n);
            return s;
        },
        [](long double a, long double b) { return a + b; });
    return DensityEstimate::empirical(static_cast<double>(sum / std::log(static_cast<long double>(x))),
                                      Method{MethodKind::logarithmic, x});
}

/// d M(A cap [1, T]) for each T of the grid (non-decreasing in T).
[[nodiscard]] inline std::vector<DensityEstimate> sequential_density(const GeneratorSet& A,
                                                                     std::span<const std::uint64_t> grid,
                                                                     const DensityOptions& opt = {}) {
    std::vector<DensityEstimate> out;
    for (std::uint64_t T : grid) {
        DensityEstimate e = density_bracket(A.truncated(T), opt);
        if (e.is_exact()) e.method = Method{MethodKind::sequential, T};
        out.push_back(std::move(e));
    }
    return out;
}

/// Smallest divisor of n lying in A, or infinity when n is not in M(A).
[[nodiscard]] inline ExtNat d1(const DivisorSpectrum& spec, const GeneratorSet& A) {
    for (std::uint64_t d : spec.divisors)
        if (A.contains(d)) return d;
    return ExtNat::infinity();
}

/// Frequency of n <= x with n^{1-eps} < d_1(n, A) <= n.
[[nodiscard]] inline double criterion4_scan(const GeneratorSet& A, double eps, std::uint64_t x, unsigned threads = 1) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("criterion4_scan requires 0 < eps < 1");
    if (x == 0) throw DomainError("criterion4_scan requires x >= 1");
    const std::uint64_t hits = chunked_reduce(
        1, x + 1, kSegment, threads, std::uint64_t{0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            std::vector<std::uint64_t> least(hi - lo, 0);
            for (std::uint64_t a : A.elements()) {
                if (a >= hi) break;
                for (std::uint64_t m = (lo + a - 1) / a * a; m < hi; m += a)
                    if (least[m - lo] == 0) least[m - lo] = a;
            }
            std::uint64_t h = 0;
            for (std::uint64_t n = lo; n < hi; ++n) {
                const std::uint64_t d = least[n - lo];
                if (d && (1.0 - eps) * std::log(static_cast<double>(n)) < std::log(static_cast<double>(d))) ++h;
            }
            return h;
        },
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    return static_cast<double>(hits) / static_cast<double>(x);
}

struct BehrendCheck {
    double lhs = 0;  ///< 1 - d M(A cup B)
    double rhs = 0;  ///< (1 - d M(A)) (1 - d M(B))
    bool ok = false;
    bool equality = false;
    bool exact = false;
};

/// Behrend's inequality 1 - d M(A cup B) >= (1 - d M(A))(1 - d M(B)).
[[nodiscard]] inline BehrendCheck behrend_ineq_check(const GeneratorSet& A, const GeneratorSet& B,
                                                     const DensityOptions& opt = {}) {
    const auto a = density_bracket(A, opt);
    const auto b = density_bracket(B, opt);
    const auto ab = density_bracket(A.united(B), opt);
    BehrendCheck r;
    r.lhs = 1.0 - ab.point;
    r.rhs = (1.0 - a.point) * (1.0 - b.point);
    if (a.is_exact() && b.is_exact() && ab.is_exact()) {
        const Rational lhs = 1 - *ab.exact;
        const Rational rhs = (1 - *a.exact) * (1 - *b.exact);
        r.exact = true;
        r.ok = lhs >= rhs;
        r.equality = lhs == rhs;
    } else {
        r.ok = 1.0 - ab.upper >= (1.0 - a.lower) * (1.0 - b.lower) - 1e-12;
        r.equality = std::abs(r.lhs - r.rhs) <= 1e-12;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Block sequences

/// Integers in (T, H T].
struct Block {
    double T;
    double H;
};

enum class BlockFamily { explicit_blocks, besicovitch, a_lambda, theorem3 };

struct BlockSequence {
    std::vector<Block> blocks;
    BlockFamily family = BlockFamily::explicit_blocks;
    std::vector<double> params;
    double eta = 0.1;
    /// T_{J+1} when the family defines it, so the last block is fully validated.
    std::optional<double> next_T;

    /// Union of the integer blocks as a generator set.
    [[nodiscard]] GeneratorSet integers(std::size_t cap = 10'000'000) const {
        std::vector<std::uint64_t> v;
        for (const auto& b : blocks) {
            const double hi = b.H * b.T;
            if (!(hi < 1.8e19)) throw ResourceError("block upper end exceeds 64 bits");
            const auto first = static_cast<std::uint64_t>(std::floor(b.T)) + 1;
            const auto last = static_cast<std::uint64_t>(std::floor(hi));
            if (last >= first && v.size() + (last - first + 1) > cap) throw ResourceError("block integers exceed cap");
            for (std::uint64_t n = first; n <= last; ++n) v.push_back(n);
        }
        return GeneratorSet::of(std::move(v));
    }
};

/// Growth condition 1 + 1/T_j^{1-eta} <= H_j <= min(T_j, T_{j+1}/T_j); throws
/// ConstraintError naming the first failing (1-based) j.
inline void validate_blocks(const std::vector<Block>& blocks, double eta, std::optional<double> next_T = std::nullopt) {
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
    constexpr double rel = 1e-12;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        const auto [T, H] = blocks[j];
        const std::string where = "block j=" + std::to_string(j + 1);
        if (!(T >= 2.0) || !std::isfinite(T)) throw ConstraintError(where + ": T_j must be finite and >= 2", j + 1);
        if (!(H > 1.0)) throw ConstraintError(where + ": H_j must exceed 1", j + 1);
        if (H < (1.0 + std::pow(T, eta - 1.0)) * (1 - rel)) throw ConstraintError(where + ": H_j below 1 + T_j^{eta-1}", j + 1);
        if (H > T * (1 + rel)) throw ConstraintError(where + ": H_j exceeds T_j", j + 1);
        const std::optional<double> T_next = j + 1 < blocks.size() ? std::optional(blocks[j + 1].T) : next_T;
        if (T_next && H > *T_next / T * (1 + rel)) throw ConstraintError(where + ": H_j exceeds T_{j+1}/T_j", j + 1);
    }
}

/// Builds J blocks of a family and validates the growth condition.
///  explicit_blocks: params = T_1, H_1, T_2, H_2, ...
///  besicovitch:     params = {T_1 (default 2)}; T_{j+1} = T_j^2, H_j = 2
///  a_lambda:        params = {lambda}; blocks (exp j^lambda, 2 exp j^lambda]
///  theorem3:        params = {sigma, tau, gamma, alpha, [kappa = 2], [log T_1 = 2]};
///                   log(T_{j+1}/T_j) = kappa j^sigma log(j+2)^tau,
///                   log H_j = log(j+2)^gamma / j^alpha
[[nodiscard]] inline BlockSequence block_builder(BlockFamily family, std::vector<double> params, std::size_t J,
                                                 double eta = 0.1) {
    BlockSequence seq;
    seq.family = family;
    seq.params = params;
    seq.eta = eta;
    auto need = [&](std::size_t n) {
        if (params.size() < n) throw DomainError("block family needs " + std::to_string(n) + " parameters");
    };
    switch (family) {
        case BlockFamily::explicit_blocks: {
            if (params.size() % 2) throw DomainError("explicit blocks need (T, H) pairs");
            for (std::size_t i = 0; i + 1 < params.size(); i += 2) seq.blocks.push_back({params[i], params[i + 1]});
            break;
        }
        case BlockFamily::besicovitch: {
            double T = params.empty() ? 2.0 : params[0];
            for (std::size_t j = 0; j < J; ++j) {
                seq.blocks.push_back({T, 2.0});
                T *= T;
            }
            seq.next_T = T;
            break;
        }
        case BlockFamily::a_lambda: {
            need(1);
            const double lam = params[0];
            for (std::size_t j = 1; j <= J; ++j) seq.blocks.push_back({std::exp(std::pow(double(j), lam)), 2.0});
            seq.next_T = std::exp(std::pow(double(J + 1), lam));
            break;
        }
        case BlockFamily::theorem3: {
            need(4);
            const double sigma = params[0], tau = params[1], gamma = params[2], alpha = params[3];
            const double kappa = params.size() > 4 ? params[4] : 2.0;
            double logT = params.size() > 5 ? params[5] : 2.0;
            for (std::size_t j = 1; j <= J; ++j) {
                const double jj = static_cast<double>(j);
                const double logH = std::pow(std::log(jj + 2), gamma) / std::pow(jj, alpha);
                seq.blocks.push_back({std::exp(logT), std::exp(logH)});
                logT += kappa * std::pow(jj, sigma) * std::pow(std::log(jj + 2), tau);
            }
            seq.next_T = std::exp(logT);
            break;
        }
    }
    for (std::size_t j = 0; j < seq.blocks.size(); ++j) {
        if (!std::isfinite(seq.blocks[j].T * seq.blocks[j].H)) {
            throw ConstraintError("block j=" + std::to_string(j + 1) + " overflows double range", j + 1);
        }
    }
    if (seq.next_T && !std::isfinite(*seq.next_T)) seq.next_T.reset();
    validate_blocks(seq.blocks, eta, seq.next_T);
    return seq;
}

inline const double kSigma0 = std::log(2.0) / (1.0 - std::log(2.0));

/// Critical exponent alpha_0(sigma) for block Behrend sequences.
[[nodiscard]] inline double alpha0(double sigma) {
    if (!(sigma > -1.0)) throw DomainError("alpha0 requires sigma > -1");
    return sigma <= kSigma0 ? (1.0 - std::log(2.0)) * (kSigma0 - sigma) : kSigma0 - sigma;
}

/// Partial sums of sum_j (log H_j / log T_j)^exponent.
[[nodiscard]] inline std::vector<double> block_delta_series(const BlockSequence& seq, double exponent) {
    std::vector<double> out;
    double s = 0;
    for (const auto& b : seq.blocks) {
        s += std::pow(std::log(b.H) / std::log(b.T), exponent);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Friable lower bound m(y)

/// m(y) = prod_{p<=y}(1-1/p) sum_{r in M(A_y), P+(r) <= y} 1/r with
/// A_y = {a in A : P+(a) <= y}. y-friable r <= X are enumerated; the mass of
/// the unenumerated friables (known exactly from the Euler product) widens
/// the bracket, so a coarse truncation is never silent.
[[nodiscard]] inline DensityEstimate m_of_y(const GeneratorSet& A, std::uint64_t y, std::uint64_t X = 1'000'000'000'000ULL,
                                            std::uint64_t max_terms = 20'000'000) {
    if (y < 2) throw DomainError("m_of_y requires y >= 2");
    const auto primes = primes_up_to(y);
    std::vector<std::uint64_t> Ay;
    for (std::uint64_t a : A.elements())
        if (factor_trial(a).p_plus() <= y) Ay.push_back(a);
    Ay = GeneratorSet::of(Ay).primitive().elements();
    if (Ay.empty()) return DensityEstimate::from_exact(Rational(0));

    long double mertens = 1, euler = 1;
    for (std::uint64_t p : primes) {
        mertens *= 1 - 1.0L / p;
        euler /= 1 - 1.0L / p;
    }
    long double s_in = 0, s_all = 0;
    std::uint64_t visited = 0;
    auto rec = [&](auto&& self, std::size_t idx, std::uint64_t r) -> void {
        if (visited >= max_terms) return;
        ++visited;
        const long double inv = 1.0L / static_cast<long double>(r);
        s_all += inv;
        if (std::any_of(Ay.begin(), Ay.end(), [r](std::uint64_t a) { return r % a == 0; })) s_in += inv;
        for (std::size_t i = idx; i < primes.size(); ++i) {
            if (r > X / primes[i]) break;
            self(self, i, r * primes[i]);
        }
    };
    rec(rec, 0, 1);
    const long double tail = std::max(0.0L, euler - s_all);
    const double lo = static_cast<double>(mertens * s_in);
    const double hi = static_cast<double>(mertens * (s_in + tail)) + 1e-15;
    auto est = DensityEstimate::bracketed(lo, hi, Method{MethodKind::friable_sum, X});
    est.fallback = visited >= max_terms;
    return est;
}

// ---------------------------------------------------------------------------
// The set E = {d d' : d < d' < 2d}

/// n = d d' with d < d' < 2d for some divisor d.
[[nodiscard]] inline bool is_in_E(const DivisorSpectrum& spec) {
    const u128 n = spec.n();
    for (std::uint64_t d : spec.divisors) {
        const u128 dd = static_cast<u128>(d) * d;
        if (dd >= n) break;
        if (n < 2 * dd) return true;
    }
    return false;
}

/// n in M(E) iff n has two divisors d < d' < 2d, i.e. two consecutive
/// divisors with ratio below 2.
[[nodiscard]] inline bool in_ME(const DivisorSpectrum& spec) {
    const auto& d = spec.divisors;
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (d[i + 1] < 2 * d[i]) return true;
    return false;
}

/// Literal definition: some divisor m of n lies in E (quadratic in tau(n)).
[[nodiscard]] inline bool in_ME_literal(const DivisorSpectrum& spec) {
    const auto& ds = spec.divisors;
    for (std::uint64_t m : ds) {
        for (std::uint64_t d : ds) {
            const u128 dd = static_cast<u128>(d) * d;
            if (dd >= m) break;
            if (m % d == 0 && m < 2 * dd) return true;
        }
    }
    return false;
}

/// Elements of E up to x.
[[nodiscard]] inline GeneratorSet e_set_members(std::uint64_t x) {
    std::vector<bool> mark(x + 1, false);
    for (std::uint64_t d = 1; d * (d + 1) <= x; ++d)
        for (std::uint64_t e = d + 1; e < 2 * d && d * e <= x; ++e) mark[d * e] = true;
    std::vector<std::uint64_t> v;
    for (std::uint64_t m = 1; m <= x; ++m)
        if (mark[m]) v.push_back(m);
    return GeneratorSet::of(std::move(v));
}

// ---------------------------------------------------------------------------
// M([n, 2n]) remainder and gaps

struct RemainderResult {
    std::uint64_t n = 0;
    std::uint64_t x = 0;
    DensityEstimate eps;    ///< eps_n = d M([n, 2n])
    std::uint64_t count = 0;  ///< M_n(x)
    double remainder = 0;   ///< R_n(x) = M_n(x) - eps_n x
    double band = 0;        ///< half-width induced by the eps_n uncertainty
};

struct RemainderOptions {
    std::uint64_t x_ref = 100'000'000;
    unsigned threads = 1;
};

/// eps_n: exact when [n, 2n] has at most 24 integers, otherwise a long-run
/// sieve estimate at x_ref; the band is x times the drift between x_ref/2 and x_ref.
[[nodiscard]] inline std::pair<DensityEstimate, double> eps_interval(std::uint64_t n, const RemainderOptions& opt) {
    if (n == 0) throw DomainError("eps_interval requires n >= 1");
    const GeneratorSet A = GeneratorSet::closed(n, 2 * n);
    if (A.size() <= 24) {
        auto e = density_bracket(A);
        if (e.is_exact()) return {e, 0.0};
    }
    const auto full = sieve_density(A, opt.x_ref, opt.threads);
    const auto half = sieve_density(A, opt.x_ref / 2, opt.threads);
    return {full, std::abs(full.point - half.point)};
}

[[nodiscard]] inline RemainderResult remainder_Rn(std::uint64_t n, std::uint64_t x, const RemainderOptions& opt = {}) {
    const auto [eps, drift] = eps_interval(n, opt);
    RemainderResult r;
    r.n = n;
    r.x = x;
    r.eps = eps;
    r.count = multiples_count(GeneratorSet::closed(n, 2 * n), x, opt.threads);
    r.remainder = static_cast<double>(r.count) - eps.point * static_cast<double>(x);
    r.band = static_cast<double>(x) * std::max(drift, eps.upper - eps.lower);
    return r;
}

struct GapResult {
    std::uint64_t gap = 0;
    std::uint64_t location = 0;  ///< element of M((n, 2n]) starting the gap
};

/// Largest gap between consecutive elements of M((n, 2n]) cap [1, X].
[[nodiscard]] inline GapResult max_gap(std::uint64_t n, std::uint64_t X) {
    const GeneratorSet A = GeneratorSet::interval(n, 2 * n);
    GapResult best;
    std::uint64_t prev = 0, members = 0;
    std::vector<std::uint8_t> c;
    for (std::uint64_t lo = 1; lo <= X; lo += kSegment) {
        const std::uint64_t hi = std::min(X + 1, lo + kSegment);
        divisor_hits(A, lo, hi, c);
        for (std::uint64_t v = lo; v < hi; ++v) {
            if (!c[v - lo]) continue;
            if (members++ && v - prev > best.gap) best = {v - prev, prev};
            prev = v;
        }
    }
    if (members < 2) throw DomainError("max_gap: fewer than two elements of M((n, 2n]) up to X");
    return best;
}

}  // namespace divilab

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "primes.hpp"

namespace divilab {

/// beta_r = (log 3 - 1)^m / (log 3 - 1/3)^{m-1} with 2^{m-1} < r + 1 <= 2^m.
[[nodiscard]] inline double beta_r(std::uint64_t r) {
    if (r == 0) throw DomainError("beta_r requires r >= 1");
    int m = 0;
    while ((1ULL << m) < r + 1) ++m;
    const double l3 = std::log(3.0);
    return std::pow(l3 - 1, m) / std::pow(l3 - 1.0 / 3.0, m - 1);
}

/// F(lambda) = b log b - b + 1 with b = -1 + (1 + lambda)/log 2 for
/// lambda <= 3 log 2 - 1, and lambda - log 2 beyond.
[[nodiscard]] inline double raouj_F(double lambda) {
    const double l2 = std::numbers::ln2;
    if (lambda > 3 * l2 - 1) return lambda - l2;
    const double b = -1 + (1 + lambda) / l2;
    if (b < 0) throw DomainError("raouj_F requires lambda >= log 2 - 1");
    return (b > 0 ? b * std::log(b) : 0.0) - b + 1;
}

/// Prime sums entering A and C, truncated at `limit`.
struct MertensSums {
    std::uint64_t limit = 0;
    long double log_excess = 0;   ///< sum_{p<=N} (log(1/(1-1/p)) - 1/p)
    long double recip_pp1 = 0;    ///< sum_{p<=N} 1/(p(p-1))
    long double tail_bound = 0;   ///< both tails are below sum_{n>N} 1/(n(n-1)) = 1/N
};

[[nodiscard]] inline MertensSums mertens_sums(std::uint64_t limit = 1'000'000) {
    MertensSums s;
    s.limit = limit;
    const auto primes = primes_up_to(limit);
    for (auto it = primes.rbegin(); it != primes.rend(); ++it) {
        const long double p = static_cast<long double>(*it);
        s.log_excess += -std::log1p(-1 / p) - 1 / p;
        s.recip_pp1 += 1 / (p * (p - 1));
    }
    s.tail_bound = 1.0L / static_cast<long double>(limit);
    return s;
}

struct NamedConstant {
    std::string name;
    std::string formula;
    double value = 0;
    double lower = 0;  ///< rigorous bracket when the value rests on a truncated sum
    double upper = 0;
    std::optional<double> printed;  ///< published decimal value, when one is printed
    int printed_decimals = 0;
    /// Accepted deviation from `printed` when `custom_tolerance` is set.
    double tolerance = 0;
    bool custom_tolerance = false;

    /// True when `printed` is `value` rounded or truncated to the printed
    /// decimals, or when a custom tolerance was set and is met.
    [[nodiscard]] bool matches_printed() const {
        if (!printed) return true;
        if (custom_tolerance) return std::abs(value - *printed) <= tolerance;
        const double scale = std::pow(10.0, printed_decimals);
        const double p = std::round(*printed * scale);
        return p == std::round(value * scale) || p == std::trunc(value * scale);
    }
};

struct ConstantTable {
    std::vector<NamedConstant> entries;
    /// C = A - 2/3 - sum 1/(p(p-1)) as printed, and the published decimal; the
    /// two disagree, so C is reported, never asserted.
    double C_from_formula = 0;
    double C_published = 0.36798;

    [[nodiscard]] const NamedConstant& at(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return e;
        throw DomainError("unknown constant " + name);
    }
};

[[nodiscard]] inline ConstantTable constant_table(std::uint64_t prime_limit = 1'000'000) {
    const double l2 = std::numbers::ln2;
    const double l3 = std::log(3.0);
    ConstantTable t;
    auto add = [&](std::string name, std::string formula, double v, std::optional<double> printed, int decimals,
                   double lo = NAN, double hi = NAN, double tol = 0) {
        NamedConstant c{std::move(name), std::move(formula), v, std::isnan(lo) ? v : lo, std::isnan(hi) ? v : hi,
                        printed, decimals, tol > 0 ? tol : 0.5 * std::pow(10.0, -decimals), tol > 0};
        t.entries.push_back(std::move(c));
    };

    const double delta = 1 - (1 + std::log(l2)) / l2;
    add("delta", "1 - (1 + log log 2)/log 2", delta, 0.08607, 5);
    add("beta", "1 - (1 + log log 3)/log 3", 1 - (1 + std::log(l3)) / l3, 0.00415, 5);
    add("gamma_delta", "log 2 / log((1 - 1/log 27)/(1 - 1/log 3))",
        l2 / std::log((1 - 1 / std::log(27.0)) / (1 - 1 / l3)), 0.33827, 5);
    add("lambda_star", "log 4 - 1", std::log(4.0) - 1, std::nullopt, 0);
    add("sigma_0", "log 2/(1 - log 2)", l2 / (1 - l2), std::nullopt, 0);
    add("c_pseudo", "(1 - log 2)/delta", (1 - l2) / delta, 3.566509, 6);

    const MertensSums ms = mertens_sums(prime_limit);
    const long double A_trunc = std::numbers::egamma_v<long double> - ms.log_excess;
    const double A = static_cast<double>(A_trunc);
    add("A", "gamma - sum_p (log(1/(1-1/p)) - 1/p)", A, 0.26150, 5, static_cast<double>(A_trunc - ms.tail_bound), A,
        1e-4);
    add("b", "1/3 + A", 1.0 / 3.0 + A, 0.59483, 5);
    add("hall_c", "1/2 - log(pi^2/6)/log 4", 0.5 - std::log(std::numbers::pi * std::numbers::pi / 6) / std::log(4.0),
        0.14098, 5);
    add("two_minus_log4", "2 - log 4", 2 - std::log(4.0), 0.61370, 5);
    add("beta_1", "log 3 - 1", beta_r(1), 0.09861, 5);
    add("beta_2", "(log 3 - 1)^2/(log 3 - 1/3)", beta_r(2), 0.01271, 5);
    add("beta_3", "(log 3 - 1)^2/(log 3 - 1/3)", beta_r(3), 0.01271, 5);
    add("beta_4", "(log 3 - 1)^3/(log 3 - 1/3)^2", beta_r(4), 0.00164, 5);
    add("F_lambda_star", "F(log 4 - 1)", raouj_F(std::log(4.0) - 1), std::nullopt, 0);
    t.C_from_formula = static_cast<double>(A_trunc - 2.0L / 3.0L - ms.recip_pp1);
    return t;
}

}  // namespace divilab

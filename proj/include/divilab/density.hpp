#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace divilab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

[[nodiscard]] inline double to_double(const Rational& q) { return q.convert_to<double>(); }

[[nodiscard]] inline std::string to_string(const Rational& q) {
    return numerator(q).str() + (denominator(q) == 1 ? "" : "/" + denominator(q).str());
}

enum class MethodKind {
    exact_ie,      ///< full inclusion-exclusion over the lcm lattice
    exact_period,  ///< exact residue count over one period
    bonferroni,    ///< truncated inclusion-exclusion (rigorous bracket)
    sieve_count,   ///< |S cap [1, x]| / x
    logarithmic,   ///< (sum_{n <= x, n in S} 1/n) / H_x
    sequential,    ///< exact density of a truncation A cap [1, T]
    monte_carlo,   ///< sampled proportion with Wilson bracket
    friable_sum,   ///< truncated friable series with rigorous tail
};

/// How a DensityEstimate was obtained: exact, bracketed or empirical.
enum class EstimateTag { exact, bracketed, empirical };

struct Method {
    MethodKind kind = MethodKind::exact_ie;
    std::uint64_t param = 0;  ///< x, T, depth or sample count
    std::uint64_t seed = 0;   ///< monte_carlo only

    [[nodiscard]] std::string to_string() const {
        switch (kind) {
            case MethodKind::exact_ie: return "exact_ie";
            case MethodKind::exact_period: return "exact_period";
            case MethodKind::bonferroni: return "bonferroni(" + std::to_string(param) + ")";
            case MethodKind::sieve_count: return "sieve_count(" + std::to_string(param) + ")";
            case MethodKind::logarithmic: return "logarithmic(" + std::to_string(param) + ")";
            case MethodKind::sequential: return "sequential(" + std::to_string(param) + ")";
            case MethodKind::monte_carlo:
                return "monte_carlo(" + std::to_string(param) + "," + std::to_string(seed) + ")";
            case MethodKind::friable_sum: return "friable_sum(" + std::to_string(param) + ")";
        }
        return "unknown";
    }

    [[nodiscard]] EstimateTag tag() const noexcept {
        switch (kind) {
            case MethodKind::exact_ie:
            case MethodKind::exact_period:
            case MethodKind::sequential: return EstimateTag::exact;
            case MethodKind::bonferroni:
            case MethodKind::monte_carlo:
            case MethodKind::friable_sum: return EstimateTag::bracketed;
            case MethodKind::sieve_count:
            case MethodKind::logarithmic: return EstimateTag::empirical;
        }
        return EstimateTag::empirical;
    }

    friend bool operator==(const Method&, const Method&) = default;
};

[[nodiscard]] inline const char* to_string(EstimateTag t) noexcept {
    switch (t) {
        case EstimateTag::exact: return "exact";
        case EstimateTag::bracketed: return "bracketed";
        case EstimateTag::empirical: return "empirical";
    }
    return "empirical";
}

/// A density value with its bracket 0 <= lower <= point <= upper <= 1.
/// Exact methods carry the rational value and a degenerate bracket.
struct DensityEstimate {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    Method method;
    std::optional<Rational> exact;
    bool fallback = false;  ///< exact route was requested but a cap forced a bracket

    [[nodiscard]] static DensityEstimate from_exact(const Rational& q, Method m = {}) {
        const double v = to_double(q);
        return DensityEstimate{v, v, v, m, q, false};
    }

    [[nodiscard]] static DensityEstimate bracketed(double lo, double hi, Method m) {
        lo = std::clamp(lo, 0.0, 1.0);
        hi = std::clamp(hi, 0.0, 1.0);
        if (lo > hi) std::swap(lo, hi);
        return DensityEstimate{0.5 * (lo + hi), lo, hi, m, std::nullopt, false};
    }

    [[nodiscard]] static DensityEstimate empirical(double v, Method m) {
        v = std::clamp(v, 0.0, 1.0);
        return DensityEstimate{v, v, v, m, std::nullopt, false};
    }

    [[nodiscard]] bool is_exact() const noexcept { return exact.has_value(); }
    [[nodiscard]] bool contains(double v, double slack = 0.0) const noexcept {
        return lower - slack <= v && v <= upper + slack;
    }
};

}  // namespace divilab

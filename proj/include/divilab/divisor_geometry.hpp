#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "error.hpp"

namespace divilab {

/// Bounded weight f on divisors for the oscillating Delta(n, f).
class OscWeight {
public:
    enum class Kind { unit, moebius, character };

    [[nodiscard]] static OscWeight unit() { return OscWeight(Kind::unit); }
    [[nodiscard]] static OscWeight moebius() { return OscWeight(Kind::moebius); }

    /// Real Dirichlet character given by its values on residues 0..modulus-1.
    /// Divisors sharing a factor with the modulus get weight 0.
    [[nodiscard]] static OscWeight character(std::uint64_t modulus, std::vector<double> table) {
        if (modulus == 0 || table.size() != modulus) throw DomainError("character table must have `modulus` entries");
        if (modulus > 1 && table[1] != 1.0) throw DomainError("character must satisfy chi(1) = 1");
        for (std::uint64_t a = 0; a < modulus; ++a) {
            if (!(std::abs(table[a]) <= 1.0)) throw DomainError("character values must lie in [-1, 1]");
            const bool coprime = std::gcd(a, modulus) == 1;
            if (coprime != (table[a] != 0.0)) throw DomainError("character must vanish exactly off the unit group");
            for (std::uint64_t b = 0; b < modulus; ++b) {
                if (std::abs(table[(a * b) % modulus] - table[a] * table[b]) > 1e-12) {
                    throw DomainError("character table is not completely multiplicative");
                }
            }
        }
        OscWeight w(Kind::character);
        w.modulus_ = modulus;
        w.table_ = std::move(table);
        return w;
    }

    [[nodiscard]] static OscWeight principal(std::uint64_t modulus) {
        std::vector<double> t(modulus);
        for (std::uint64_t a = 0; a < modulus; ++a) t[a] = std::gcd(a, modulus) == 1 ? 1.0 : 0.0;
        return character(modulus, std::move(t));
    }

    /// The non-principal character modulo 4.
    [[nodiscard]] static OscWeight chi4() { return character(4, {0.0, 1.0, 0.0, -1.0}); }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::uint64_t modulus() const noexcept { return modulus_; }

    /// f(d) for a divisor d of the integer whose factorisation is `of_n`.
    [[nodiscard]] double operator()(std::uint64_t d, const Factored& of_n) const {
        switch (kind_) {
            case Kind::unit: return 1.0;
            case Kind::moebius: {
                int mu = 1;
                for (const auto& pp : of_n.factors()) {
                    if (d % pp.prime) continue;
                    d /= pp.prime;
                    if (d % pp.prime == 0) return 0.0;
                    mu = -mu;
                }
                return mu;
            }
            case Kind::character: return table_[d % modulus_];
        }
        return 0.0;
    }

private:
    explicit OscWeight(Kind k) : kind_(k) {}
    Kind kind_;
    std::uint64_t modulus_ = 1;
    std::vector<double> table_;
};

/// Bounded weight on ratios t in (0, 1] for F(n; theta).
class RatioWeight {
public:
    enum class Form { indicator, table };

    /// theta(t) = 1 if t > threshold else 0.
    [[nodiscard]] static RatioWeight indicator(double threshold) {
        if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("indicator threshold must lie in (0, 1)");
        RatioWeight w(Form::indicator);
        w.threshold_ = threshold;
        return w;
    }

    /// Piecewise-linear through ascending sample points, constant beyond the ends.
    [[nodiscard]] static RatioWeight table(std::vector<std::pair<double, double>> points) {
        if (points.empty()) throw DomainError("ratio table needs at least one point");
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto [t, v] = points[i];
            if (!(t > 0.0 && t <= 1.0) || !std::isfinite(v)) throw DomainError("ratio table points must lie in (0, 1] x R");
            if (i > 0 && !(t > points[i - 1].first)) throw DomainError("ratio table abscissae must ascend");
        }
        RatioWeight w(Form::table);
        w.points_ = std::move(points);
        return w;
    }

    [[nodiscard]] static RatioWeight constant(double v) { return table({{1.0, v}}); }

    /// Dense tabulation of a smooth callable with linear interpolation.
    [[nodiscard]] static RatioWeight smooth(const std::function<double(double)>& fn, std::size_t samples = 4096) {
        if (samples < 2) throw DomainError("smooth ratio weight needs >= 2 samples");
        std::vector<std::pair<double, double>> pts;
        pts.reserve(samples);
        for (std::size_t i = 1; i <= samples; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(samples);
            pts.emplace_back(t, fn(t));
        }
        return table(std::move(pts));
    }

    [[nodiscard]] double operator()(double t) const {
        if (form_ == Form::indicator) return t > threshold_ ? 1.0 : 0.0;
        if (t <= points_.front().first) return points_.front().second;
        if (t >= points_.back().first) return points_.back().second;
        const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                         [](double x, const auto& p) { return x < p.first; });
        const auto& [t1, v1] = *it;
        const auto& [t0, v0] = *(it - 1);
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }

private:
    explicit RatioWeight(Form f) : form_(f) {}
    Form form_;
    double threshold_ = 0.5;
    std::vector<std::pair<double, double>> points_;
};

/// Erdos-Hooley Delta(n): most divisors in a window (e^u, e^{u+1}].
/// A run d_i..d_j fits in such a window iff log d_j - log d_i < 1.
[[nodiscard]] inline std::uint64_t delta(const DivisorSpectrum& spec) {
    const auto& lg = spec.logs;
    std::size_t best = 1;
    std::size_t j = 0;
    for (std::size_t i = 0; i < lg.size(); ++i) {
        if (j < i) j = i;
        while (j + 1 < lg.size() && lg[j + 1] - lg[i] < 1.0) ++j;
        best = std::max(best, j - i + 1);
    }
    return best;
}

/// Delta(n, f) = sup over windows (e^u, e^{u+v}], 0 <= v <= 1, of |sum f(d)|.
[[nodiscard]] inline double delta_osc(const DivisorSpectrum& spec, const OscWeight& f) {
    const auto& lg = spec.logs;
    std::vector<double> w(spec.tau());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = f(spec.divisors[i], spec.factorization);
    double best = 0.0;
    for (std::size_t i = 0; i < lg.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = i; j < lg.size() && lg[j] - lg[i] < 1.0; ++j) {
            s += w[j];
            best = std::max(best, std::abs(s));
        }
    }
    return best;
}

/// Dyadic cell index k with 2^k < d <= 2^{k+1}; d = 1 gives -1.
[[nodiscard]] constexpr int dyadic_cell(std::uint64_t d) noexcept {
    return static_cast<int>(std::bit_width(d - 1)) - 1;
}

/// tau+(n): number of dyadic cells (2^k, 2^{k+1}] that contain a divisor.
[[nodiscard]] inline std::uint64_t tau_plus(const DivisorSpectrum& spec) {
    std::uint64_t cells = 0;
    int last = -2;
    for (std::uint64_t d : spec.divisors) {
        const int k = dyadic_cell(d);
        if (k != last) {
            ++cells;
            last = k;
        }
    }
    return cells;
}

/// Propinquity E_r(n) = min_j log(d_{j+r} / d_j).
[[nodiscard]] inline double e_r(const DivisorSpectrum& spec, std::size_t r) {
    if (r == 0) throw DomainError("e_r requires r >= 1");
    const auto& d = spec.divisors;
    if (d.size() <= r) throw DomainError("e_r: tau(n) must exceed r");
    std::uint64_t num = d[r], den = d[0];
    for (std::size_t j = 1; j + r < d.size(); ++j) {
        // d[j+r]/d[j] < num/den, exactly
        if (static_cast<unsigned __int128>(d[j + r]) * den < static_cast<unsigned __int128>(num) * d[j]) {
            num = d[j + r];
            den = d[j];
        }
    }
    return std::log1p(static_cast<double>(num - den) / static_cast<double>(den));
}

/// G(n) = sum of adjacent divisor ratios d_i / d_{i+1}.
[[nodiscard]] inline double g_sum(const DivisorSpectrum& spec) {
    const auto& d = spec.divisors;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) s += static_cast<double>(d[i]) / static_cast<double>(d[i + 1]);
    return s;
}

/// F(n; theta) = (1/tau(n)) sum theta(d_i / d_{i+1}).
[[nodiscard]] inline double f_theta(const DivisorSpectrum& spec, const RatioWeight& theta) {
    const auto& d = spec.divisors;
    if (d.size() < 2) throw DomainError("f_theta requires tau(n) >= 2");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) s += theta(static_cast<double>(d[i]) / static_cast<double>(d[i + 1]));
    return s / static_cast<double>(d.size());
}

/// U_j(n) = (log log p_j(n) - j) / sqrt(j). For p_j = 2 the double log is
/// negative and is returned as is.
[[nodiscard]] inline double u_stat(const Factored& f, std::size_t j) {
    if (j == 0 || j > f.omega()) throw DomainError("u_stat requires 1 <= j <= omega(n)");
    const double jj = static_cast<double>(j);
    return (std::log(std::log(static_cast<double>(f.prime(j)))) - jj) / std::sqrt(jj);
}

/// h_alpha(n) = #{k <= omega(n) : |log log p_k(n) - k| <= alpha_k}; alpha is
/// non-negative, non-increasing and indexed from k = 1.
[[nodiscard]] inline std::uint32_t h_alpha(const Factored& f, std::span<const double> alpha) {
    if (alpha.size() < f.omega()) throw DomainError("h_alpha: alpha shorter than omega(n)");
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (!(alpha[k] >= 0.0)) throw DomainError("h_alpha: alpha must be non-negative");
        if (k > 0 && alpha[k] > alpha[k - 1]) throw DomainError("h_alpha: alpha must be non-increasing");
    }
    std::uint32_t count = 0;
    for (std::size_t k = 1; k <= f.omega(); ++k) {
        const double dev = std::abs(std::log(std::log(static_cast<double>(f.prime(k)))) - static_cast<double>(k));
        count += dev <= alpha[k - 1];
    }
    return count;
}

}  // namespace divilab

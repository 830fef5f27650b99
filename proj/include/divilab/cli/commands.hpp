#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "../divilab.hpp"
#include "config.hpp"
#include "record.hpp"

namespace divilab::cli {

using Runner = std::function<ResultRecord(const Params&, const RunConfig&)>;

namespace detail {

inline void echo_params(ResultRecord& r, const Params& p) {
    for (const auto& [k, v] : p.all()) r.param(k, v);
}

[[nodiscard]] inline Cell ex(std::uint64_t v) { return Cell::exact(v); }
[[nodiscard]] inline Cell exr(double v) { return Cell::real(v, EstimateTag::exact); }
[[nodiscard]] inline Cell emp(double v) { return Cell::real(v, EstimateTag::empirical); }
[[nodiscard]] inline Cell txt(std::string s) { return Cell::text(std::move(s)); }

/// --what values of `fn`.
[[nodiscard]] inline Cell fn_value(const std::string& what, const DivisorSpectrum& s) {
    const auto colon = what.find(':');
    const std::string head = what.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : what.substr(colon + 1);
    if (head == "delta") return ex(delta(s));
    if (head == "delta-mu") return exr(delta_osc(s, OscWeight::moebius()));
    if (head == "delta-chi4") return exr(delta_osc(s, OscWeight::chi4()));
    if (head == "tauplus") return ex(tau_plus(s));
    if (head == "er") return exr(e_r(s, parse_u64("er", arg.empty() ? "1" : arg)));
    if (head == "g") return exr(g_sum(s));
    if (head == "ftheta") return exr(f_theta(s, RatioWeight::indicator(parse_real("ftheta", arg.empty() ? "0.5" : arg))));
    if (head == "tau") return ex(s.tau());
    const ArithmeticFunctions a = basic_fns(s.factorization);
    if (head == "sigma") return ex(a.sigma);
    if (head == "omega") return ex(a.omega);
    if (head == "bigomega") return ex(a.big_omega);
    if (head == "mu") return Cell::exact_signed(a.mu);
    if (head == "phi") return ex(a.phi);
    if (head == "pplus") return ex(a.p_plus);
    if (head == "pminus") return Cell::exact_ext(a.p_minus);
    if (head == "in-me") return txt(in_ME(s) ? "true" : "false");
    throw UsageError("unknown --what '" + what + "'");
}

[[nodiscard]] inline GeneratorSet generators_from(const Params& p, ResultRecord& r) {
    if (p.has("gens")) return GeneratorSet::of(p.u64_list("gens", ""));
    if (p.has("interval")) {
        const auto yz = split(p.require("interval"), ':');
        if (yz.size() != 2) throw UsageError("--interval expects y:z");
        const std::uint64_t y = parse_u64("interval", yz[0]), z = parse_u64("interval", yz[1]);
        return p.flag("closed_left") ? GeneratorSet::closed(std::max<std::uint64_t>(y, 1), z) : GeneratorSet::interval(y, z);
    }
    if (p.has("family")) {
        const std::string fam = p.require("family");
        const auto colon = fam.find(':');
        const std::string name = fam.substr(0, colon);
        const std::vector<double> args =
            colon == std::string::npos ? std::vector<double>{} : parse_real_list("family", fam.substr(colon + 1));
        BlockFamily kind;
        if (name == "a_lambda") kind = BlockFamily::a_lambda;
        else if (name == "theorem3") kind = BlockFamily::theorem3;
        else if (name == "besicovitch") kind = BlockFamily::besicovitch;
        else if (name == "blocks") kind = BlockFamily::explicit_blocks;
        else throw UsageError("unknown block family '" + name + "'");
        const BlockSequence seq = block_builder(kind, args, p.u64("J", 5), p.real("eta", 0.1));
        for (std::size_t j = 0; j < seq.blocks.size(); ++j) {
            r.stat("T_" + std::to_string(j + 1), emp(seq.blocks[j].T));
            r.stat("H_" + std::to_string(j + 1), emp(seq.blocks[j].H));
        }
        return seq.integers();
    }
    throw UsageError("one of --gens, --interval, --family is required");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

[[nodiscard]] inline ResultRecord cmd_sieve(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "sieve";
    detail::echo_params(r, p);
    const std::uint64_t limit = p.u64("limit", 1'000'000);
    const SpfSieve s = cfg.sieve(limit);
    if (p.has("save")) s.save(p.require("save"));
    r.columns = {"n", "spf", "pplus", "is_prime"};
    for (std::uint64_t n : p.u64_list("query", "")) {
        if (n < 2) throw OutOfRangeError("sieve query requires n >= 2");
        r.row({detail::ex(n), detail::ex(s.spf(n)), detail::ex(s.largest_prime_factor(n)), Cell::flag(s.is_prime(n))});
    }
    std::uint64_t pi = 0;
    for (std::uint64_t n = 2; n <= limit; ++n) pi += s.spf_unchecked(n) == n;
    r.stat("limit", detail::ex(limit));
    r.stat("prime_count", detail::ex(pi));
    return r;
}

[[nodiscard]] inline ResultRecord cmd_fn(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "fn";
    detail::echo_params(r, p);
    std::uint64_t lo, hi;
    if (p.has("range")) {
        const auto ab = split(p.require("range"), ':');
        if (ab.size() != 2) throw UsageError("--range expects a:b");
        lo = parse_u64("range", ab[0]);
        hi = parse_u64("range", ab[1]);
    } else {
        lo = hi = p.u64("n", 0);
    }
    if (lo == 0 || hi < lo) throw DomainError("fn requires 1 <= n (and a <= b for --range)");
    const std::string what = p.str("what", "delta");
    r.columns = {"n", "value"};
    const SpfSieve s = cfg.sieve(hi);
    SpectrumBuilder sb(s);
    for (std::uint64_t n = lo; n <= hi; ++n) r.row({detail::ex(n), detail::fn_value(what, sb.build(n))});
    return r;
}

[[nodiscard]] inline ResultRecord cmd_lambda(const Params& p, const RunConfig&) {
    ResultRecord r;
    r.command = "lambda";
    detail::echo_params(r, p);
    const std::uint64_t k = p.u64("k", 1);
    if (p.flag("median")) {
        const MedianPrime m = median_prime(k);
        r.columns = {"median_prime"};
        r.row({detail::ex(m.prime)});
        r.stat("strict_prime", m.strict_prime ? detail::ex(*m.strict_prime) : detail::txt("none"));
        r.stat("cumulative", detail::exr(static_cast<double>(m.cumulative)));
        r.stat("exact_tie", Cell::flag(m.exact_tie));
        return r;
    }
    const std::uint64_t pmax = p.u64("pmax", 100);
    if (p.flag("mode")) {
        r.columns = {"p", "k_star", "lambda_star"};
        for (std::uint64_t q : primes_up_to(pmax)) {
            const LambdaMode m = lambda_mode(q);
            r.row({detail::ex(q), detail::ex(m.k), detail::exr(static_cast<double>(m.lambda))});
        }
        return r;
    }
    if (k == 0) throw DomainError("lambda requires k >= 1");
    r.columns = {"p", "lambda", "cumsum"};
    LocalLawSweep sweep(k - 1);
    long double cum = 0;
    while (sweep.prime() <= pmax) {
        const long double v = sweep.lambda(k);
        cum += v;
        r.row({detail::ex(sweep.prime()), detail::exr(static_cast<double>(v)), detail::exr(static_cast<double>(cum))});
        sweep.advance();
    }
    return r;
}

[[nodiscard]] inline ResultRecord cmd_lambdad(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "lambdad";
    detail::echo_params(r, p);
    LambdaOptions opt;
    const std::string method = p.str("method", "auto");
    if (method == "exact") opt.route = LambdaOptions::Route::exact;
    else if (method == "mc") opt.route = LambdaOptions::Route::monte_carlo;
    else if (method != "auto") throw UsageError("--method expects exact, mc or auto");
    opt.samples = p.u64("samples", opt.samples);
    opt.seed = cfg.seed;
    opt.threads = cfg.thread_count();
    const auto ks = p.u64_list("k", "1");
    const auto ds = p.u64_list("d", "1");
    r.columns = {"k", "d", "Lambda"};
    for (std::uint64_t d : ds)
        for (std::uint64_t k : ks) r.row({detail::ex(k), detail::ex(d), Cell::density(Lambda_kd(k, d, opt))});
    return r;
}

[[nodiscard]] inline ResultRecord cmd_multiples(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "multiples";
    detail::echo_params(r, p);
    const GeneratorSet A = detail::generators_from(p, r);
    const std::string spec = p.str("density", "exact");
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    const unsigned th = cfg.thread_count();
    r.columns = {"density"};
    if (kind == "exact") {
        r.row({Cell::density(density_bracket(A))});
    } else if (kind == "bonferroni") {
        r.row({Cell::density(bonferroni_bracket(A.primitive(), parse_u64("bonferroni", arg.empty() ? "4" : arg)))});
    } else if (kind == "sieve") {
        r.row({Cell::density(sieve_density(A, parse_u64("sieve", arg.empty() ? "1e6" : arg), th))});
    } else if (kind == "log") {
        r.row({Cell::density(log_density(A, parse_u64("log", arg.empty() ? "1e6" : arg), th))});
    } else if (kind == "seq") {
        r.columns = {"T", "density"};
        const auto grid = parse_u64_list("seq", arg.empty() ? "10,100,1000" : arg);
        const auto est = sequential_density(A, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) r.row({detail::ex(grid[i]), Cell::density(est[i])});
    } else {
        throw UsageError("unknown --density '" + spec + "'");
    }
    r.stat("generators", detail::ex(A.size()));
    r.stat("primitive_generators", detail::ex(A.primitive().size()));
    return r;
}

// ---------------------------------------------------------------------------
// Experiment presets

[[nodiscard]] inline ResultRecord preset_median_primes(const Params& p, const RunConfig&) {
    ResultRecord r;
    r.command = "exp:median-primes";
    detail::echo_params(r, p);
    r.columns = {"k", "median_prime", "strict_prime", "cumulative", "exact_tie"};
    for (std::uint64_t k : p.u64_list("k", "2..3")) {
        const MedianPrime m = median_prime(k);
        r.row({detail::ex(k), detail::ex(m.prime), m.strict_prime ? detail::ex(*m.strict_prime) : detail::txt("none"),
               detail::exr(static_cast<double>(m.cumulative)), Cell::flag(m.exact_tie)});
    }
    return r;
}

[[nodiscard]] inline ResultRecord preset_nu(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:nu";
    detail::echo_params(r, p);
    const std::uint64_t x = p.u64("x", 1'000'000);
    std::vector<double> grid = p.real_list("grid", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95,1");
    const SpfSieve s = cfg.sieve(x);
    const auto d = nu_distribution(x, grid, s, cfg.thread_count());
    r.columns = {"grid", "cdf"};
    for (std::size_t i = 0; i < d.grid.size(); ++i) r.row({detail::exr(d.grid[i]), detail::emp(d.cdf[i])});
    const double eta = p.real("eta", 0.05);
    r.stat("mass_above_1_minus_eta", detail::emp(nu_upper_mass(x, eta, s, cfg.thread_count())));
    return r;
}

[[nodiscard]] inline ResultRecord preset_pplus(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:pplus";
    detail::echo_params(r, p);
    const std::uint64_t x = p.u64("x", 1'000'000);
    const auto alphas = p.real_list("alpha", "0.05,0.1,0.2");
    const SpfSieve s = cfg.sieve(x + 2);
    const PplusStats st = pplus_adjacency(x, s, alphas, 40, cfg.thread_count());
    r.columns = {"alpha", "frac_exceeding"};
    for (std::size_t i = 0; i < alphas.size(); ++i) r.row({detail::exr(alphas[i]), detail::emp(st.frac_exceeding[i])});
    r.stat("frac_up", detail::emp(st.frac_up));
    r.stat("frac_triple_down", detail::emp(st.frac_triple_down));
    r.stat("first_triple_down", st.first_triple_down ? detail::ex(*st.first_triple_down) : detail::txt("none"));
    const auto [c, v] = maximize_lower_bound();
    r.stat("lower_bound_c_star", detail::exr(c));
    r.stat("lower_bound_value", detail::exr(v));
    return r;
}

[[nodiscard]] inline ResultRecord preset_erdos_kac(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:erdos-kac";
    detail::echo_params(r, p);
    const std::uint64_t x = p.u64("x", 1'000'000);
    const SpfSieve s = cfg.sieve(x);
    const ErdosKacResult ek = erdos_kac(x, s, p.flag("big_omega"), cfg.thread_count());
    r.columns = {"k", "count", "z", "cdf", "gaussian"};
    for (std::size_t k = 0, i = 0; k < ek.counts.size(); ++k) {
        if (ek.counts[k] == 0) continue;
        const double z = ek.dist.grid[i];
        r.row({detail::ex(k), detail::ex(ek.counts[k]), detail::exr(z), detail::emp(ek.dist.cdf[i]),
               detail::exr(gaussian_cdf(z))});
        ++i;
    }
    r.stat("ks", detail::emp(ek.ks));
    r.stat("median", detail::ex(ek.median));
    r.stat("loglog_x", detail::exr(std::log(std::log(static_cast<double>(x)))));
    return r;
}

[[nodiscard]] inline ResultRecord preset_constants(const Params& p, const RunConfig&) {
    ResultRecord r;
    r.command = "exp:constants";
    detail::echo_params(r, p);
    const ConstantTable t = constant_table(p.u64("prime_limit", 1'000'000));
    r.columns = {"name", "value", "lower", "upper", "printed", "matches_printed", "formula"};
    for (const auto& c : t.entries) {
        const bool exact = c.lower == c.upper;
        const Cell v = Cell::real(c.value, exact ? EstimateTag::exact : EstimateTag::bracketed);
        r.row({detail::txt(c.name), v, Cell::real(c.lower, v.tag.value()), Cell::real(c.upper, v.tag.value()),
               c.printed ? detail::exr(*c.printed) : detail::txt("none"), Cell::flag(c.matches_printed()),
               detail::txt(c.formula)});
    }
    r.stat("C_from_formula", Cell::real(t.C_from_formula, EstimateTag::bracketed));
    r.stat("C_published", detail::exr(t.C_published));
    return r;
}

[[nodiscard]] inline ResultRecord preset_tsum(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:tsum";
    detail::echo_params(r, p);
    const auto xs = p.u64_list("x", "1000,10000,100000,1000000");
    const SpfSieve s = cfg.sieve(*std::max_element(xs.begin(), xs.end()));
    r.columns = {"x", "direct", "dyadic", "agree", "R", "s_avg"};
    for (std::uint64_t x : xs) {
        const TSum t = t_sum(x, s, true, cfg.thread_count());
        r.row({detail::ex(x), detail::ex(t.direct), detail::ex(*t.dyadic), Cell::flag(t.direct == *t.dyadic),
               detail::exr(t_ratio(x, t.direct)), detail::exr(s_avg(x, s, cfg.thread_count()))});
    }
    return r;
}

[[nodiscard]] inline ResultRecord preset_eps(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:eps";
    detail::echo_params(r, p);
    const std::uint64_t y = p.u64("y", 4), z = p.u64("z", 8);
    const EpsPair e = eps_pair(y, z, p.u64("x", std::max<std::uint64_t>(z, 10'000'000)), cfg.thread_count());
    r.columns = {"eps", "eps1", "rho1"};
    r.row({Cell::density(e.eps), Cell::density(e.eps1),
           Cell::real(e.rho1, e.eps.is_exact() ? EstimateTag::exact : EstimateTag::empirical)});
    return r;
}

[[nodiscard]] inline ResultRecord preset_totients(const Params& p, const RunConfig&) {
    ResultRecord r;
    r.command = "exp:totients";
    detail::echo_params(r, p);
    r.columns = {"x", "count", "count_log_x_over_x"};
    for (std::uint64_t x : p.u64_list("x", "1000,10000,100000,1000000")) {
        const std::uint64_t c = totient_values(x);
        const double xd = static_cast<double>(x);
        r.row({detail::ex(x), detail::ex(c), detail::exr(static_cast<double>(c) * std::log(xd) / xd)});
    }
    return r;
}

[[nodiscard]] inline ResultRecord preset_dtheta(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:dtheta";
    detail::echo_params(r, p);
    const std::string th = p.str("theta", "golden");
    long double theta;
    if (th == "golden") theta = (std::sqrt(5.0L) - 1) / 2;
    else if (th == "sqrt2") theta = std::sqrt(2.0L) - 1;
    else if (th == "e") theta = std::numbers::e_v<long double> - 2;
    else if (th == "pi") theta = std::numbers::pi_v<long double> - 3;
    else theta = parse_real("theta", th);
    const auto cf = continued_fraction(theta, p.u64("J", 12));
    const auto conv = convergents(cf);
    const auto growth = convergent_growth(conv);
    r.columns = {"j", "a_j", "p_j", "q_j"};
    for (std::size_t j = 0; j < conv.size(); ++j)
        r.row({detail::ex(j), detail::ex(cf[j]), detail::ex(static_cast<std::uint64_t>(conv[j].p)),
               detail::ex(static_cast<std::uint64_t>(conv[j].q))});
    for (std::size_t j = 0; j < growth.size(); ++j) r.stat("log_q_ratio_" + std::to_string(j), detail::exr(growth[j]));
    const std::uint64_t lo = p.u64("lo", 2), hi = p.u64("hi", 100'000);
    const SpfSieve s = cfg.sieve(hi);
    r.stat("median_log_inv_dist_over_log_tau", detail::emp(dtheta_statistic_median(theta, lo, hi, s)));
    return r;
}

[[nodiscard]] inline ResultRecord preset_exceptions(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:exceptions";
    detail::echo_params(r, p);
    const auto xs = p.u64_list("x", "10000,100000,1000000");
    const SpfSieve s = cfg.sieve(xs.back());
    const auto c = exceptional_counts(xs, s, cfg.thread_count());
    r.columns = {"x", "not_in_ME", "frac_in_ME"};
    for (std::size_t i = 0; i < xs.size(); ++i)
        r.row({detail::ex(xs[i]), detail::ex(c[i]),
               detail::emp(1.0 - static_cast<double>(c[i]) / static_cast<double>(xs[i]))});
    return r;
}

[[nodiscard]] inline ResultRecord preset_omega_median(const Params& p, const RunConfig& cfg) {
    ResultRecord r;
    r.command = "exp:omega-median";
    detail::echo_params(r, p);
    const auto xs = p.u64_list("x", "10000,100000,1000000");
    const SpfSieve s = cfg.sieve(xs.back());
    r.columns = {"x", "count", "fitted_minus_C"};
    for (std::uint64_t x : xs) {
        const OmegaMedianCount o = omega_median_count(x, s, cfg.thread_count());
        r.row({detail::ex(x), detail::ex(o.count), detail::emp(o.formula_gap)});
    }
    const ConstantTable t = constant_table();
    r.stat("C_from_formula", Cell::real(t.C_from_formula, EstimateTag::bracketed));
    r.stat("C_published", detail::exr(t.C_published));
    return r;
}

/// Preset and subcommand runners by name, as used by `exp` and manifests.
[[nodiscard]] inline const std::map<std::string, Runner>& presets() {
    static const std::map<std::string, Runner> table = {
        {"median-primes", preset_median_primes}, {"nu", preset_nu},
        {"pplus", preset_pplus},                 {"erdos-kac", preset_erdos_kac},
        {"constants", preset_constants},         {"tsum", preset_tsum},
        {"eps", preset_eps},                     {"totients", preset_totients},
        {"dtheta", preset_dtheta},               {"exceptions", preset_exceptions},
        {"omega-median", preset_omega_median},
    };
    return table;
}

[[nodiscard]] inline const std::map<std::string, Runner>& subcommands() {
    static const std::map<std::string, Runner> table = {
        {"sieve", cmd_sieve}, {"fn", cmd_fn}, {"lambda", cmd_lambda}, {"lambdad", cmd_lambdad}, {"multiples", cmd_multiples},
    };
    return table;
}

}  // namespace divilab::cli

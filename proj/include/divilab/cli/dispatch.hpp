#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "record.hpp"

namespace divilab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitUsage = 64;

/// Runs one command, converting library errors into an error record.
[[nodiscard]] inline ResultRecord execute(const std::string& name, const Runner& run, const Params& p,
                                          const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord r;
    try {
        r = run(p, cfg);
    } catch (const UsageError& e) {
        r.error = e.what();
        r.exit_code = kExitUsage;
    } catch (const DomainError& e) {
        r.error = e.what();
        r.exit_code = kExitDomain;
    } catch (const ResourceError& e) {
        r.error = e.what();
        r.exit_code = kExitResource;
    } catch (const std::bad_alloc&) {
        r.error = "out of memory";
        r.exit_code = kExitResource;
    }
    if (r.error) {
        r.command = name;
        r.params.clear();
        for (const auto& [k, v] : p.all()) r.param(k, v);
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct ManifestEntry {
    std::string name;
    Params params;
};

/// One entry per non-blank line: `name key=value ...`; '#' starts a comment.
[[nodiscard]] inline std::vector<ManifestEntry> parse_manifest(std::istream& in) {
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        ManifestEntry e;
        if (!(ss >> e.name)) continue;
        std::string kv;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw UsageError("manifest line " + std::to_string(lineno) + ": expected key=value, got '" + kv + "'");
            e.params.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// Executes manifest entries in order. The exit code is that of the first
/// failing entry, or 0.
[[nodiscard]] inline std::pair<std::vector<ResultRecord>, int> run_manifest(const std::vector<ManifestEntry>& entries,
                                                                           const RunConfig& cfg) {
    std::vector<ResultRecord> out;
    int code = kExitOk;
    for (const auto& e : entries) {
        Params p = e.params;
        for (const auto& [k, v] : cfg.params.all()) p.set_default(k, v);
        const Runner* run = nullptr;
        if (auto it = presets().find(e.name); it != presets().end()) run = &it->second;
        else if (auto jt = subcommands().find(e.name); jt != subcommands().end()) run = &jt->second;
        ResultRecord r;
        if (run) {
            r = execute(e.name, *run, p, cfg);
        } else {
            r.command = e.name;
            r.error = "unknown manifest entry '" + e.name + "'";
            r.exit_code = kExitUsage;
        }
        if (r.exit_code != kExitOk && code == kExitOk) code = r.exit_code;
        out.push_back(std::move(r));
    }
    return {std::move(out), code};
}

inline void write_stream(std::ostream& out, const std::vector<ResultRecord>& records, Format f) {
    if (f == Format::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : records) arr.push_back(r.to_json());
        out << arr.dump(2) << '\n';
        return;
    }
    for (const auto& r : records) {
        out << "## " << r.command << '\n';
        write_record(out, r, f);
    }
}

/// Parses argv, runs the selected subcommand and writes its ResultRecord.
/// Returns 0, 2 (domain error), 3 (resource error) or 64 (usage error).
[[nodiscard]] inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                                  std::ostream& err = std::cerr) {
    CLI::App app{"divilab: divisor structure and prime factor statistics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, format = "text", out_path, cache;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::uint64_t sieve_limit = 0;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--out", out_path, "write the record to this file");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed for Monte Carlo paths");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = all cores)");
    auto* cache_opt = app.add_option("--sieve-cache", cache, "sieve cache file (DIVILAB_CACHE overrides)");
    auto* limit_opt = app.add_option("--sieve-limit", sieve_limit, "minimum sieve limit");

    Params params;
    std::string selected;
    auto str_opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(flag, [&params, key](const std::string& v) { params.set(key, v); }, help);
    };
    auto bool_flag = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
        sub->add_flag_callback(flag, [&params, key] { params.set(key, "true"); }, help);
    };

    auto* sieve = app.add_subcommand("sieve", "build or query the smallest-prime-factor sieve");
    str_opt(sieve, "--limit", "limit", "sieve limit");
    str_opt(sieve, "--query", "query", "integers to factor, comma list");
    str_opt(sieve, "--save", "save", "write the sieve to this cache file");

    auto* fn = app.add_subcommand("fn", "per-integer divisor statistics");
    str_opt(fn, "--n", "n", "integer");
    str_opt(fn, "--range", "range", "a:b inclusive");
    str_opt(fn, "--what", "what",
            "delta, delta-mu, delta-chi4, tauplus, er:R, g, ftheta:T, tau, sigma, omega, bigomega, mu, phi, pplus, "
            "pminus, in-me");

    auto* lambda = app.add_subcommand("lambda", "local law of the k-th prime factor");
    str_opt(lambda, "--k", "k", "index k");
    str_opt(lambda, "--pmax", "pmax", "largest prime listed");
    bool_flag(lambda, "--median", "median", "print the median prime");
    bool_flag(lambda, "--mode", "mode", "list the modal k for each prime");

    auto* lambdad = app.add_subcommand("lambdad", "local law of the k-th divisor");
    str_opt(lambdad, "--k", "k", "index k (list)");
    str_opt(lambdad, "--d", "d", "divisor d (list)");
    str_opt(lambdad, "--method", "method", "exact, mc or auto");
    str_opt(lambdad, "--samples", "samples", "Monte Carlo sample count");

    auto* multiples = app.add_subcommand("multiples", "density of a set of multiples");
    str_opt(multiples, "--gens", "gens", "generators, comma list");
    str_opt(multiples, "--interval", "interval", "y:z for the generators (y, z]");
    bool_flag(multiples, "--closed-left", "closed_left", "use [y, z] instead of (y, z]");
    str_opt(multiples, "--family", "family", "a_lambda:L, theorem3:s,t,g,a[,kappa,logT1], besicovitch[:T1], blocks:T,H,...");
    str_opt(multiples, "--J", "J", "number of blocks");
    str_opt(multiples, "--eta", "eta", "growth-condition parameter");
    str_opt(multiples, "--density", "density", "exact, bonferroni:D, sieve:x, log:x, seq:T1,T2,...");

    auto* exp = app.add_subcommand("exp", "experiment presets");
    std::string preset;
    std::vector<std::string> sets;
    std::string preset_names;
    for (const auto& [k, v] : presets()) preset_names += (preset_names.empty() ? "" : ", ") + k;
    exp->add_option("--preset", preset, preset_names)->required();
    str_opt(exp, "--x", "x", "scale x (list for some presets)");
    str_opt(exp, "--k", "k", "index list");
    exp->add_option("--set", sets, "extra preset parameter key=value");

    auto* run = app.add_subcommand("run", "execute a manifest of presets");
    std::string manifest;
    run->add_option("--manifest", manifest, "manifest file, one `name key=value ...` per line")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e, err, err);
        err << app.help();
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) load_config(config_path, cfg);
        if (app.get_option("--format")->count()) cfg.output = parse_format(format);
        if (seed_opt->count()) cfg.seed = seed;
        if (threads_opt->count()) cfg.threads = threads;
        if (cache_opt->count()) cfg.cache_path = cache;
        if (limit_opt->count()) cfg.sieve_limit = sieve_limit;
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
            params.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& [k, v] : cfg.params.all()) params.set_default(k, v);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) {
            err << "cannot open output file " << out_path << '\n';
            return kExitResource;
        }
        sink = &file;
    }

    if (run->parsed()) {
        std::ifstream in(manifest);
        if (!in) {
            err << "cannot read manifest " << manifest << '\n';
            return kExitUsage;
        }
        try {
            const auto [records, code] = run_manifest(parse_manifest(in), cfg);
            write_stream(*sink, records, cfg.output);
            for (const auto& r : records)
                if (r.error) err << r.command << ": " << *r.error << '\n';
            return code;
        } catch (const UsageError& e) {
            err << "usage error: " << e.what() << '\n';
            return kExitUsage;
        }
    }

    std::string name;
    const Runner* runner = nullptr;
    if (exp->parsed()) {
        const auto it = presets().find(preset);
        if (it == presets().end()) {
            err << "unknown preset '" << preset << "'; expected one of " << preset_names << '\n';
            return kExitUsage;
        }
        name = "exp:" + preset;
        runner = &it->second;
    } else {
        for (const auto& [k, v] : subcommands()) {
            if (app.got_subcommand(k)) {
                name = k;
                runner = &v;
            }
        }
    }
    const ResultRecord r = execute(name, *runner, params, cfg);
    if (r.error) {
        err << "error: " << *r.error << '\n';
        if (cfg.output == Format::json) write_record(*sink, r, cfg.output);
        return r.exit_code;
    }
    write_record(*sink, r, cfg.output);
    return kExitOk;
}

}  // namespace divilab::cli

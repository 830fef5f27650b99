#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../parallel.hpp"
#include "../sieve.hpp"
#include "record.hpp"

namespace divilab::cli {

/// Malformed command line or parameter value (exit 64).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[nodiscard]] inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

[[nodiscard]] inline std::uint64_t parse_u64(const std::string& key, const std::string& s) {
    std::string t = trim(s);
    // 1e6 style shorthand for powers of ten
    if (const auto e = t.find_first_of("eE"); e != std::string::npos && t.find('.') == std::string::npos) {
        const std::uint64_t mant = parse_u64(key, t.substr(0, e));
        const std::uint64_t ex = parse_u64(key, t.substr(e + 1));
        std::uint64_t v = mant;
        for (std::uint64_t i = 0; i < ex; ++i) {
            if (v > UINT64_MAX / 10) throw UsageError(key + ": value out of range: " + s);
            v *= 10;
        }
        return v;
    }
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) throw UsageError(key + ": expected a natural number, got '" + s + "'");
    return v;
}

[[nodiscard]] inline double parse_real(const std::string& key, const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw UsageError(key + ": expected a real number, got '" + s + "'");
    return v;
}

/// Comma list of naturals; `a..b` expands to the inclusive range.
[[nodiscard]] inline std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split(s, ',')) {
        if (const auto r = part.find(".."); r != std::string::npos) {
            const std::uint64_t a = parse_u64(key, part.substr(0, r)), b = parse_u64(key, part.substr(r + 2));
            if (b < a || b - a > 10'000'000) throw UsageError(key + ": bad range " + part);
            for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
        } else {
            out.push_back(parse_u64(key, part));
        }
    }
    return out;
}

[[nodiscard]] inline std::vector<double> parse_real_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_real(key, part));
    return out;
}

/// Flat string parameters of one command or preset.
class Params {
public:
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_default(const std::string& key, const std::string& value) { values_.emplace(key, value); }
    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

    [[nodiscard]] std::string str(const std::string& key, const std::string& def) const {
        const auto it = values_.find(key);
        return it == values_.end() ? def : it->second;
    }
    [[nodiscard]] std::string require(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw UsageError("missing parameter '" + key + "'");
        return it->second;
    }
    [[nodiscard]] std::uint64_t u64(const std::string& key, std::uint64_t def) const {
        return has(key) ? parse_u64(key, require(key)) : def;
    }
    [[nodiscard]] double real(const std::string& key, double def) const {
        return has(key) ? parse_real(key, require(key)) : def;
    }
    [[nodiscard]] bool flag(const std::string& key) const {
        const std::string v = str(key, "false");
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw UsageError(key + ": expected a boolean, got '" + v + "'");
    }
    [[nodiscard]] std::vector<std::uint64_t> u64_list(const std::string& key, const std::string& def) const {
        return parse_u64_list(key, str(key, def));
    }
    [[nodiscard]] std::vector<double> real_list(const std::string& key, const std::string& def) const {
        return parse_real_list(key, str(key, def));
    }

    [[nodiscard]] const std::map<std::string, std::string>& all() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

struct RunConfig {
    std::uint64_t sieve_limit = 0;  ///< 0: sized by each command
    std::optional<std::string> cache_path;
    unsigned threads = 0;  ///< 0: hardware concurrency
    std::optional<std::uint64_t> seed;
    Format output = Format::text;
    Params params;

    [[nodiscard]] unsigned thread_count() const noexcept { return threads ? threads : default_threads(); }

    /// Cache path with DIVILAB_CACHE taking precedence.
    [[nodiscard]] std::string effective_cache() const {
        if (const char* env = std::getenv("DIVILAB_CACHE"); env && *env) return env;
        return cache_path.value_or("");
    }

    /// Sieve covering max(limit, sieve_limit), through the cache when one is set.
    [[nodiscard]] SpfSieve sieve(std::uint64_t limit) const {
        limit = std::max<std::uint64_t>({limit, sieve_limit, 2});
        return cached_sieve(limit, effective_cache());
    }
};

[[nodiscard]] inline Format parse_format(const std::string& s) {
    if (s == "text") return Format::text;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw UsageError("unknown output format '" + s + "'");
}

/// key=value lines; '#' starts a comment. Known keys fill RunConfig, the rest
/// become parameter defaults.
inline void load_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key == "sieve_limit") cfg.sieve_limit = parse_u64(key, value);
        else if (key == "cache_path") cfg.cache_path = value;
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u64(key, value));
        else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "output" || key == "format") cfg.output = parse_format(value);
        else cfg.params.set(key, value);
    }
}

}  // namespace divilab::cli

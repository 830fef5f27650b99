#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "../density.hpp"
#include "../ext_nat.hpp"

namespace divilab::cli {

inline constexpr const char* kArtifactVersion = "0.3.0";

enum class Format { text, csv, json };

/// A single output value. Numbers always carry an exact/bracketed/empirical tag;
/// densities additionally carry their bracket and method.
struct Cell {
    using Payload = std::variant<std::string, std::int64_t, std::uint64_t, double, ExtNat>;
    Payload value;
    std::optional<EstimateTag> tag;
    std::optional<std::pair<double, double>> bracket;
    std::string method;
    std::string rational;

    [[nodiscard]] static Cell text(std::string s) { return {std::move(s), std::nullopt, {}, {}, {}}; }
    [[nodiscard]] static Cell exact(std::uint64_t v) { return {v, EstimateTag::exact, {}, {}, {}}; }
    [[nodiscard]] static Cell exact_signed(std::int64_t v) { return {v, EstimateTag::exact, {}, {}, {}}; }
    [[nodiscard]] static Cell exact_ext(ExtNat v) { return {v, EstimateTag::exact, {}, {}, {}}; }
    [[nodiscard]] static Cell real(double v, EstimateTag t) { return {v, t, {}, {}, {}}; }
    [[nodiscard]] static Cell flag(bool b) { return text(b ? "true" : "false"); }
    [[nodiscard]] static Cell density(const DensityEstimate& e) {
        Cell c{e.point, e.method.tag(), std::pair{e.lower, e.upper}, e.method.to_string(), {}};
        if (e.exact) c.rational = to_string(*e.exact);
        if (e.fallback) c.method += "+fallback";
        return c;
    }
};

/// Numbers rendered with 12 significant digits in the C locale.
[[nodiscard]] inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

[[nodiscard]] inline double round12(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_real(v).c_str(), nullptr);
}

[[nodiscard]] inline std::string cell_text(const Cell::Payload& p) {
    struct V {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(const ExtNat& v) const { return v.to_string(); }
    };
    return std::visit(V{}, p);
}

[[nodiscard]] inline nlohmann::ordered_json cell_json(const Cell& c) {
    using J = nlohmann::ordered_json;
    struct V {
        J operator()(const std::string& s) const { return s; }
        J operator()(std::int64_t v) const { return v; }
        J operator()(std::uint64_t v) const { return v; }
        J operator()(double v) const { return std::isfinite(v) ? J(round12(v)) : J(format_real(v)); }
        J operator()(const ExtNat& v) const { return v.is_infinite() ? J("inf") : J(v.value()); }
    };
    const J v = std::visit(V{}, c.value);
    if (!c.tag) return v;
    J o = J::object();
    o["value"] = v;
    o["tag"] = to_string(*c.tag);
    if (c.bracket) {
        o["lower"] = round12(c.bracket->first);
        o["upper"] = round12(c.bracket->second);
    }
    if (!c.method.empty()) o["method"] = c.method;
    if (!c.rational.empty()) o["rational"] = c.rational;
    return o;
}

struct ResultRecord {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;
    std::vector<std::string> notes;
    std::optional<std::string> error;
    int exit_code = 0;
    double wall_time = 0;

    void param(std::string key, std::string value) { params.emplace_back(std::move(key), std::move(value)); }
    void row(std::vector<Cell> cells) { rows.push_back(std::move(cells)); }
    void stat(std::string name, Cell c) { summary.emplace_back(std::move(name), std::move(c)); }

    [[nodiscard]] nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["artifact_version"] = kArtifactVersion;
        j["params"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : params) j["params"][k] = v;
        if (error) {
            j["error"] = *error;
            j["exit_code"] = exit_code;
        }
        j["columns"] = columns;
        j["values"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json o = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < r.size() && i < columns.size(); ++i) o[columns[i]] = cell_json(r[i]);
            j["values"].push_back(std::move(o));
        }
        if (!summary.empty()) {
            j["summary"] = nlohmann::ordered_json::object();
            for (const auto& [k, c] : summary) j["summary"][k] = cell_json(c);
        }
        if (!notes.empty()) j["notes"] = notes;
        j["wall_time"] = round12(wall_time);
        return j;
    }
};

namespace detail {

[[nodiscard]] inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

[[nodiscard]] inline bool column_has(const ResultRecord& r, std::size_t i, bool (*pred)(const Cell&)) {
    for (const auto& row : r.rows)
        if (i < row.size() && pred(row[i])) return true;
    return false;
}

}  // namespace detail

/// CSV: one header line, tags in a `<column>_tag` column after each tagged
/// column and bracket columns after each density column.
inline void write_csv(std::ostream& out, const ResultRecord& r) {
    std::vector<bool> tagged(r.columns.size()), bracketed(r.columns.size());
    std::string header;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        tagged[i] = detail::column_has(r, i, [](const Cell& c) { return c.tag.has_value(); });
        bracketed[i] = detail::column_has(r, i, [](const Cell& c) { return c.bracket.has_value(); });
        if (i) header += ',';
        header += r.columns[i];
        if (bracketed[i]) header += "," + r.columns[i] + "_lower," + r.columns[i] + "_upper," + r.columns[i] + "_method";
        if (tagged[i]) header += "," + r.columns[i] + "_tag";
    }
    out << header << '\n';
    for (const auto& row : r.rows) {
        std::string line;
        for (std::size_t i = 0; i < r.columns.size(); ++i) {
            const Cell* c = i < row.size() ? &row[i] : nullptr;
            if (i) line += ',';
            if (c) line += detail::csv_escape(cell_text(c->value));
            if (bracketed[i]) {
                if (c && c->bracket)
                    line += "," + format_real(c->bracket->first) + "," + format_real(c->bracket->second) + "," +
                            detail::csv_escape(c->method);
                else
                    line += ",,,";
            }
            if (tagged[i]) line += "," + std::string(c && c->tag ? to_string(*c->tag) : "");
        }
        out << line << '\n';
    }
    for (const auto& [k, c] : r.summary) {
        out << "# " << k << '=' << cell_text(c.value);
        if (c.tag) out << ',' << to_string(*c.tag);
        out << '\n';
    }
}

/// One text line: values separated by spaces, each number followed by its
/// tag in braces.
[[nodiscard]] inline std::string text_line(const std::vector<Cell>& row, const std::vector<std::string>& columns,
                                       const std::string& label = {}) {
    std::string line = label.empty() ? "" : label + ": ";
    for (std::size_t i = 0; i < row.size(); ++i) {
        const Cell& c = row[i];
        if (i) line += ' ';
        if (row.size() > 1 && i < columns.size()) line += columns[i] + '=';
        line += cell_text(c.value);
        if (c.tag) {
            line += std::string(" {") + to_string(*c.tag);
            if (c.bracket) {
                line += c.bracket->first == c.bracket->second
                            ? " lower=upper=" + format_real(c.bracket->first)
                            : " lower=" + format_real(c.bracket->first) + " upper=" + format_real(c.bracket->second);
            }
            if (!c.method.empty()) line += " method=" + c.method;
            if (!c.rational.empty()) line += " rational=" + c.rational;
            line += '}';
        }
    }
    return line;
}

inline void write_text(std::ostream& out, const ResultRecord& r) {
    if (r.error) {
        out << "error: " << *r.error << '\n';
        return;
    }
    for (const auto& row : r.rows) out << text_line(row, r.columns) << '\n';
    for (const auto& [k, c] : r.summary) out << text_line({c}, {}, k) << '\n';
    for (const auto& n : r.notes) out << "# " << n << '\n';
}

inline void write_record(std::ostream& out, const ResultRecord& r, Format f) {
    switch (f) {
        case Format::text: write_text(out, r); break;
        case Format::csv: write_csv(out, r); break;
        case Format::json: out << r.to_json().dump(2) << '\n'; break;
    }
}

}  // namespace divilab::cli

#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dampedbar/config.hpp"
#include "dampedbar/error.hpp"
#include "dampedbar/excitation.hpp"
#include "dampedbar/modal_response.hpp"

namespace dampedbar {

// ---------------------------------------------------------------- tables

using Cell = std::variant<std::string, double, long long, bool>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw Error("ResultTable: row width does not match schema");
        rows.push_back(std::move(row));
    }
};

// 17 significant digits: every double survives a text round trip.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::string>) return v;
            else if constexpr (std::is_same_v<V, double>) return format_number(v);
            else if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
            else return std::to_string(v);
        },
        c);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace detail

inline std::string to_csv(const ResultTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += detail::csv_field(t.columns[i]);
    }
    out += "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += detail::csv_field(format_cell(row[i]));
        }
        out += "\r\n";
    }
    return out;
}

// Array of records. Non-finite numbers become strings since JSON has no literal for them.
inline std::string to_json(const ResultTable& t) {
    std::string out = "[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += r ? ",\n  {" : "\n  {";
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            if (i) out += ", ";
            out += nlohmann::json(t.columns[i]).dump() + ": ";
            const Cell& c = t.rows[r][i];
            if (const auto* d = std::get_if<double>(&c); d && std::isfinite(*d)) out += format_number(*d);
            else if (std::holds_alternative<double>(c) || std::holds_alternative<std::string>(c))
                out += nlohmann::json(format_cell(c)).dump();
            else out += format_cell(c);
        }
        out += "}";
    }
    out += t.rows.empty() ? "]\n" : "\n]\n";
    return out;
}

// RFC-4180 reader; returns every record including the header.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"') {
            quoted = true;
            any = true;
        } else if (ch == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (ch == '\r' || ch == '\n') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                record.push_back(std::move(field));
                out.push_back(std::move(record));
            }
            record.clear();
            field.clear();
            any = false;
        } else {
            field += ch;
            any = true;
        }
    }
    if (quoted) throw InvalidInput("parse_csv: unterminated quoted field");
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        out.push_back(std::move(record));
    }
    return out;
}

// ---------------------------------------------------------------- config

struct FemSettings {
    int elements = 40;
    double dt = 1e-3;
    double t_final = 0.5;
    std::vector<int> element_counts;  // fem-eigs / spurious-scan; empty -> command default
    double instability_tolerance = 1e-8;
};

struct RunConfig {
    std::optional<BarConfig> bar;
    std::optional<PhysicalBar> physical;
    int k = 15;
    int grid_points = 200;
    std::vector<double> x;  // explicit grid; overrides grid_points
    std::vector<double> t{0.0};
    ExcitationSpec excitation;
    ResponseMethod method = ResponseMethod::General;
    FemSettings fem;

    bool has_bar() const { return bar.has_value() || physical.has_value(); }

    BarConfig resolved() const {
        if (bar) return *bar;
        if (physical) return derive_config(*physical);
        throw InvalidInput("config: no bar parameters given (need \"bar\" or \"physical\")");
    }

    std::vector<double> x_grid() const {
        if (!x.empty()) return x;
        const double L = resolved().L;
        std::vector<double> g(static_cast<std::size_t>(grid_points));
        for (int i = 0; i < grid_points; ++i) g[static_cast<std::size_t>(i)] = L * i / (grid_points - 1);
        g.back() = L;
        return g;
    }
};

class ConfigError : public InvalidInput {
public:
    ConfigError(const std::string& path, const std::string& what)
        : InvalidInput("config" + (path.empty() ? std::string() : " field '" + path + "'") + ": " + what) {}
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw ConfigError(join_path(path, key), "unknown key");
}

inline const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(join_path(path, key), "missing required key");
    return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

inline int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

inline std::vector<double> as_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline double number_or(const json& j, const std::string& path, const char* key, double dflt) {
    return j.contains(key) ? as_number(j.at(key), join_path(path, key)) : dflt;
}

inline std::string type_of(const json& j, const std::string& path) {
    const json& t = need(j, path, "type");
    if (!t.is_string()) throw ConfigError(join_path(path, "type"), "expected a string");
    return t.get<std::string>();
}

inline Profile parse_profile(const json& j, const std::string& path) {
    const std::string type = type_of(j, path);
    try {
        if (type == "zero") {
            check_keys(j, path, {"type"});
            return profile::Zero{};
        }
        if (type == "constant") {
            check_keys(j, path, {"type", "value"});
            return profile::Constant{as_number(need(j, path, "value"), join_path(path, "value"))};
        }
        if (type == "polynomial") {
            check_keys(j, path, {"type", "coeffs"});
            return profile::Polynomial{as_numbers(need(j, path, "coeffs"), join_path(path, "coeffs"))};
        }
        if (type == "sinusoid") {
            check_keys(j, path, {"type", "amplitude", "wavenumber", "phase"});
            return profile::Sinusoid{number_or(j, path, "amplitude", 1.0),
                                     as_number(need(j, path, "wavenumber"), join_path(path, "wavenumber")),
                                     number_or(j, path, "phase", 0.0)};
        }
        if (type == "sampled") {
            check_keys(j, path, {"type", "x", "values"});
            return profile::Sampled{as_numbers(need(j, path, "x"), join_path(path, "x")),
                                    as_numbers(need(j, path, "values"), join_path(path, "values"))};
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join_path(path, "type"), "unknown profile type '" + type + "'");
}

inline TemporalProfile parse_temporal(const json& j, const std::string& path) {
    const std::string type = type_of(j, path);
    if (type == "constant") {
        check_keys(j, path, {"type", "value"});
        return temporal::Constant{number_or(j, path, "value", 1.0)};
    }
    if (type == "exponential") {
        check_keys(j, path, {"type", "amplitude", "rate"});
        return temporal::Exponential{number_or(j, path, "amplitude", 1.0),
                                     as_number(need(j, path, "rate"), join_path(path, "rate"))};
    }
    if (type == "sinusoid") {
        check_keys(j, path, {"type", "amplitude", "frequency", "phase"});
        return temporal::Sinusoid{number_or(j, path, "amplitude", 1.0),
                                  as_number(need(j, path, "frequency"), join_path(path, "frequency")),
                                  number_or(j, path, "phase", 0.0)};
    }
    throw ConfigError(join_path(path, "type"), "unknown temporal type '" + type + "'");
}

inline ForcingTerm parse_forcing(const json& j, const std::string& path) {
    const std::string type = type_of(j, path);
    try {
        if (type == "zero") {
            check_keys(j, path, {"type"});
            return forcing::Zero{};
        }
        if (type == "separable") {
            check_keys(j, path, {"type", "space", "time"});
            return forcing::Separable{parse_profile(need(j, path, "space"), join_path(path, "space")),
                                      parse_temporal(need(j, path, "time"), join_path(path, "time"))};
        }
        if (type == "impulse") {
            check_keys(j, path, {"type", "space", "magnitude"});
            return forcing::TimeImpulse{parse_profile(need(j, path, "space"), join_path(path, "space")),
                                        number_or(j, path, "magnitude", 1.0)};
        }
        if (type == "point_harmonic") {
            check_keys(j, path, {"type", "amplitude", "omega", "position"});
            return forcing::PointHarmonic{number_or(j, path, "amplitude", 1.0),
                                          as_number(need(j, path, "omega"), join_path(path, "omega")),
                                          as_number(need(j, path, "position"), join_path(path, "position"))};
        }
        if (type == "sampled") {
            check_keys(j, path, {"type", "x", "t", "values"});
            return forcing::SampledField{as_numbers(need(j, path, "x"), join_path(path, "x")),
                                         as_numbers(need(j, path, "t"), join_path(path, "t")),
                                         as_numbers(need(j, path, "values"), join_path(path, "values"))};
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join_path(path, "type"), "unknown forcing type '" + type + "'");
}

inline void require_increasing(const std::vector<double>& v, const std::string& path) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ConfigError(path, "must be strictly increasing");
}

}  // namespace detail

// Strict JSON reader: unknown keys anywhere are rejected by name.
inline RunConfig parse_config(std::string_view text) {
    using nlohmann::json;
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    detail::check_keys(root, "", {"bar", "physical", "k", "grid", "excitation", "method", "fem"});

    RunConfig rc;
    if (root.contains("bar") && root.contains("physical"))
        throw ConfigError("", "give exactly one of \"bar\" and \"physical\", not both");
    if (root.contains("bar")) {
        const json& b = root.at("bar");
        detail::check_keys(b, "bar", {"h1", "h2", "c", "L"});
        BarConfig cfg{detail::as_number(detail::need(b, "bar", "h1"), "bar.h1"),
                      detail::as_number(detail::need(b, "bar", "h2"), "bar.h2"),
                      detail::as_number(detail::need(b, "bar", "c"), "bar.c"),
                      detail::as_number(detail::need(b, "bar", "L"), "bar.L")};
        try {
            validate(cfg);
        } catch (const InvalidInput& e) {
            throw ConfigError("bar", e.what());
        }
        rc.bar = cfg;
    } else if (root.contains("physical")) {
        const json& p = root.at("physical");
        detail::check_keys(p, "physical", {"rho", "A0", "E", "c1", "c2", "L", "allow_negative_damping"});
        PhysicalBar pb;
        pb.rho = detail::as_number(detail::need(p, "physical", "rho"), "physical.rho");
        pb.A0 = detail::as_number(detail::need(p, "physical", "A0"), "physical.A0");
        pb.E = detail::as_number(detail::need(p, "physical", "E"), "physical.E");
        pb.c1 = detail::as_number(detail::need(p, "physical", "c1"), "physical.c1");
        pb.c2 = detail::as_number(detail::need(p, "physical", "c2"), "physical.c2");
        pb.L = detail::as_number(detail::need(p, "physical", "L"), "physical.L");
        if (p.contains("allow_negative_damping")) {
            if (!p.at("allow_negative_damping").is_boolean())
                throw ConfigError("physical.allow_negative_damping", "expected a boolean");
            pb.allow_negative_damping = p.at("allow_negative_damping").get<bool>();
        }
        try {
            (void)derive_config(pb);
        } catch (const InvalidInput& e) {
            throw ConfigError("physical", e.what());
        }
        rc.physical = pb;
    }

    if (root.contains("k")) {
        rc.k = detail::as_int(root.at("k"), "k");
        if (rc.k < 0) throw ConfigError("k", "must be non-negative");
    }

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        detail::check_keys(g, "grid", {"points", "x", "t"});
        if (g.contains("points")) {
            rc.grid_points = detail::as_int(g.at("points"), "grid.points");
            if (rc.grid_points < 2) throw ConfigError("grid.points", "need at least 2 points");
        }
        if (g.contains("x")) {
            rc.x = detail::as_numbers(g.at("x"), "grid.x");
            if (rc.x.empty()) throw ConfigError("grid.x", "must not be empty");
            detail::require_increasing(rc.x, "grid.x");
        }
        if (g.contains("t")) {
            rc.t = detail::as_numbers(g.at("t"), "grid.t");
            if (rc.t.empty()) throw ConfigError("grid.t", "must not be empty");
            detail::require_increasing(rc.t, "grid.t");
            if (rc.t.front() < 0.0) throw ConfigError("grid.t", "times must be non-negative");
        }
    }

    if (root.contains("excitation")) {
        const json& e = root.at("excitation");
        detail::check_keys(e, "excitation", {"f", "g", "p"});
        if (e.contains("f")) rc.excitation.f = detail::parse_profile(e.at("f"), "excitation.f");
        if (e.contains("g")) rc.excitation.g = detail::parse_profile(e.at("g"), "excitation.g");
        if (e.contains("p")) rc.excitation.p = detail::parse_forcing(e.at("p"), "excitation.p");
    }

    if (root.contains("method")) {
        const json& m = root.at("method");
        if (!m.is_string()) throw ConfigError("method", "expected a string");
        const std::string s = m.get<std::string>();
        if (s == "general") rc.method = ResponseMethod::General;
        else if (s == "simplified") rc.method = ResponseMethod::Simplified;
        else throw ConfigError("method", "expected \"general\" or \"simplified\"");
    }

    if (root.contains("fem")) {
        const json& f = root.at("fem");
        detail::check_keys(f, "fem", {"elements", "dt", "t_final", "element_counts", "instability_tolerance"});
        if (f.contains("elements")) rc.fem.elements = detail::as_int(f.at("elements"), "fem.elements");
        if (rc.fem.elements < 1) throw ConfigError("fem.elements", "must be at least 1");
        rc.fem.dt = detail::number_or(f, "fem", "dt", rc.fem.dt);
        if (!(rc.fem.dt > 0.0)) throw ConfigError("fem.dt", "must be positive");
        rc.fem.t_final = detail::number_or(f, "fem", "t_final", rc.fem.t_final);
        if (!(rc.fem.t_final >= 0.0)) throw ConfigError("fem.t_final", "must be non-negative");
        rc.fem.instability_tolerance =
            detail::number_or(f, "fem", "instability_tolerance", rc.fem.instability_tolerance);
        if (f.contains("element_counts")) {
            const json& ec = f.at("element_counts");
            if (!ec.is_array()) throw ConfigError("fem.element_counts", "expected an array of integers");
            for (std::size_t i = 0; i < ec.size(); ++i) {
                const int n = detail::as_int(ec[i], "fem.element_counts[" + std::to_string(i) + "]");
                if (n < 1) throw ConfigError("fem.element_counts[" + std::to_string(i) + "]", "must be at least 1");
                rc.fem.element_counts.push_back(n);
            }
        }
    }

    if (rc.has_bar()) {
        const double L = rc.resolved().L;
        if (!rc.x.empty() && (rc.x.front() < 0.0 || rc.x.back() > L))
            throw ConfigError("grid.x", "points must lie in [0, L]");
        try {
            rc.excitation.f.check_covers(L);
            rc.excitation.g.check_covers(L);
            rc.excitation.p.check_covers(L);
        } catch (const InvalidInput& e) {
            throw ConfigError("excitation", e.what());
        }
    }
    return rc;
}

}  // namespace dampedbar

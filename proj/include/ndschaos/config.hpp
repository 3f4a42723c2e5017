#pragma once

// Run configuration: TOML schema, validation and serialization.

#include "ndschaos/error.hpp"
#include "ndschaos/interval.hpp"
#include "ndschaos/system.hpp"
#include "ndschaos/transition.hpp"

#include <toml.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ndschaos {

// A number written either as a TOML float/integer or as a rational string
// such as "1/3". The text is kept so serialization reproduces the input.
struct endpoint {
    std::string text;
    double value = 0.0;
    bool quoted = false;

    bool operator==(const endpoint& o) const { return value == o.value && quoted == o.quoted && text == o.text; }
};

struct interval_spec {
    endpoint lower, upper;
    bool operator==(const interval_spec&) const = default;
};

struct set_override_spec {
    symbol symbol_index = 1;
    std::size_t index = 0;
    std::vector<interval_spec> intervals;
    bool operator==(const set_override_spec&) const = default;
};

struct parameter_spec {
    std::string kind = "constant"; // constant | periodic | list | uniform
    double value = 0.0;
    std::vector<double> values;
    double low = 0.0, high = 0.0;
    std::uint64_t seed = 0;
    std::size_t count = 0; // 0: sized by the pipeline to cover every horizon
    bool operator==(const parameter_spec&) const = default;
};

struct induced_spec {
    std::int64_t slope = 1, offset = 0;
    std::vector<std::size_t> ks; // explicit k_0 = 0, k_1, ... when nonempty
    bool operator==(const induced_spec&) const = default;
};

struct run_config {
    // [system]
    family_kind family = family_kind::logistic;
    double offset = 0.0;
    parameter_spec parameters;
    std::optional<induced_spec> induced;
    // [sets], [transition]
    std::vector<std::vector<interval_spec>> sets;
    std::vector<set_override_spec> overrides;
    std::vector<std::vector<int>> matrix;
    // [verify]
    std::size_t horizon = 1000;
    bool strict_separation = false;
    std::optional<symbol> expansion_symbol;
    std::size_t cylinder_depth = 20;
    std::size_t cylinder_index_horizon = 100;
    double decay_threshold = 1e-3;
    std::size_t nonempty_word_length = 6;
    std::vector<std::string> require;
    // [construct]
    std::vector<std::string> theorems{"3.1", "4.2"};
    std::vector<double> selectors;
    std::vector<symbol> beta_cycle{1};
    symbol s0 = 1;
    std::int64_t m_slope = 1, m_offset = 0; // m_k = slope k + offset
    std::size_t gamma_blocks = 6;
    std::size_t levels = 4;
    std::vector<symbol> gamma_cycle{1};
    std::size_t witness_depth = 40;
    std::size_t prefix_length = 64;
    // [stats]
    std::size_t stats_horizon = 20000;
    std::size_t window = 40;
    std::size_t epsilon_count = 16;
    std::string checkpoints = "schedule"; // schedule | all
    std::size_t density_stride = 1;
    // [tolerances]
    double tau = 1e-12;
    double inclusion_slack = 1e-9;
    double proximity = 1e-6;
    double separation = 1e-6;
    double expansion = 1e-12;
    double density = 0.1;
    // [output]
    std::string out_dir = "out";

    bool operator==(const run_config&) const = default;
};

namespace detail {

inline std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline double parse_number_text(const std::string& where, const std::string& text)
{
    const auto slash = text.find('/');
    auto to_double = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') {
            s.remove_prefix(1);
        }
        while (!s.empty() && s.back() == ' ') {
            s.remove_suffix(1);
        }
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw config_error(where, "cannot parse number '" + text + "'");
        }
        return v;
    };
    if (slash == std::string::npos) {
        return to_double(text);
    }
    const double num = to_double(std::string_view(text).substr(0, slash));
    const double den = to_double(std::string_view(text).substr(slash + 1));
    if (den == 0.0) {
        throw config_error(where, "zero denominator in '" + text + "'");
    }
    return num / den;
}

inline endpoint read_endpoint(const std::string& where, const toml::node& n)
{
    if (const auto* s = n.as_string()) {
        return {s->get(), parse_number_text(where, s->get()), true};
    }
    if (const auto v = n.value<double>()) {
        return {format_double(*v), *v, false};
    }
    throw config_error(where, "expected a number or a rational string");
}

inline std::string loc(const toml::node& n, const std::string& key)
{
    const auto& src = n.source();
    if (src.begin.line == 0) {
        return key;
    }
    return key + " (line " + std::to_string(src.begin.line) + ")";
}

template <class T>
T get_or(const toml::table& t, const std::string& section, const std::string& key, T fallback)
{
    const auto* n = t.get(key);
    if (n == nullptr) {
        return fallback;
    }
    const auto v = n->value<T>();
    if (!v) {
        throw config_error(loc(*n, section + "." + key), "has the wrong type");
    }
    return *v;
}

inline const toml::table* section(const toml::table& root, const std::string& name)
{
    const auto* n = root.get(name);
    if (n == nullptr) {
        return nullptr;
    }
    const auto* t = n->as_table();
    if (t == nullptr) {
        throw config_error(loc(*n, name), "must be a table");
    }
    return t;
}

template <class T>
std::vector<T> get_array(const toml::table& t, const std::string& where, const std::string& key,
                         std::vector<T> fallback)
{
    const auto* n = t.get(key);
    if (n == nullptr) {
        return fallback;
    }
    const auto* arr = n->as_array();
    if (arr == nullptr) {
        throw config_error(loc(*n, where + "." + key), "must be an array");
    }
    std::vector<T> out;
    for (const auto& e : *arr) {
        const auto v = e.value<T>();
        if (!v) {
            throw config_error(loc(e, where + "." + key), "array element has the wrong type");
        }
        out.push_back(*v);
    }
    return out;
}

inline std::vector<interval_spec> read_intervals(const std::string& where, const toml::node& n)
{
    const auto* arr = n.as_array();
    if (arr == nullptr || arr->empty()) {
        throw config_error(loc(n, where), "must be a nonempty array of [lower, upper] pairs");
    }
    std::vector<interval_spec> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        const auto item_where = where + "[" + std::to_string(i) + "]";
        const auto* pair = (*arr)[i].as_array();
        if (pair == nullptr || pair->size() != 2) {
            throw config_error(loc((*arr)[i], item_where), "must be a [lower, upper] pair");
        }
        interval_spec iv{read_endpoint(item_where, (*pair)[0]), read_endpoint(item_where, (*pair)[1])};
        if (!(iv.lower.value < iv.upper.value)) {
            throw config_error(loc((*arr)[i], item_where), "empty interval (lower must be < upper)");
        }
        out.push_back(iv);
    }
    return out;
}

inline std::size_t get_size(const toml::table& t, const std::string& where, const std::string& key,
                            std::size_t fallback)
{
    const auto v = get_or<std::int64_t>(t, where, key, static_cast<std::int64_t>(fallback));
    if (v < 0) {
        throw config_error(where + "." + key, "must be non-negative");
    }
    return static_cast<std::size_t>(v);
}

} // namespace detail

// Range, positivity and structural checks shared by parse and by overrides
// applied from the command line.
inline void validate(const run_config& c)
{
    const std::pair<const char*, double> tolerances[] = {
        {"tolerances.tau", c.tau},           {"tolerances.inclusion_slack", c.inclusion_slack},
        {"tolerances.proximity", c.proximity}, {"tolerances.separation", c.separation},
        {"tolerances.expansion", c.expansion}, {"tolerances.density", c.density}};
    for (const auto& [name, v] : tolerances) {
        if (!(v > 0.0)) {
            throw config_error(name, "tolerance must be positive");
        }
    }
    if (!(c.decay_threshold > 0.0)) {
        throw config_error("verify.decay_threshold", "must be positive");
    }
    if (c.sets.size() < 2) {
        throw config_error("sets.V", "at least two sets are required");
    }
    if (c.matrix.size() != c.sets.size()) {
        throw config_error("transition.matrix", "matrix size must equal the number of sets");
    }
    const auto& p = c.parameters;
    if (p.kind != "constant" && p.kind != "periodic" && p.kind != "list" && p.kind != "uniform") {
        throw config_error("system.parameters.kind", "unknown kind '" + p.kind + "'");
    }
    if ((p.kind == "periodic" || p.kind == "list") && p.values.empty()) {
        throw config_error("system.parameters.values", "must be nonempty");
    }
    if (p.kind == "uniform" && !(p.low <= p.high)) {
        throw config_error("system.parameters", "low must not exceed high");
    }
    if (c.horizon < 1 || c.stats_horizon < 1) {
        throw config_error("horizon", "horizons must be >= 1");
    }
    if (c.levels < 1) {
        throw config_error("construct.levels", "levels must be >= 1");
    }
    if (c.gamma_blocks < 1) {
        throw config_error("construct.gamma_blocks", "must be >= 1");
    }
    if (c.checkpoints != "schedule" && c.checkpoints != "all") {
        throw config_error("stats.checkpoints", "must be 'schedule' or 'all'");
    }
    if (c.density_stride < 1 || c.epsilon_count < 1) {
        throw config_error("stats", "density_stride and epsilon_count must be >= 1");
    }
    for (const auto& t : c.theorems) {
        if (t != "3.1" && t != "4.2") {
            throw config_error("construct.theorems", "unknown theorem '" + t + "' (expected 3.1 or 4.2)");
        }
    }
    if (c.induced && c.induced->ks.empty()) {
        if (c.induced->slope < 1 || c.induced->offset < 0 || c.induced->slope + c.induced->offset < 1) {
            throw config_error("system.induced", "k_n = slope n + offset must be increasing with k_1 >= 1");
        }
    }
    for (const auto& t : c.require) {
        static const char* known[] = {"theorem-3.1", "corollary-3.1", "theorem-4.2", "corollary-4.1",
                                      "corollary-4.2"};
        if (std::find(std::begin(known), std::end(known), t) == std::end(known)) {
            throw config_error("verify.require", "unknown result '" + t + "'");
        }
    }
}

// Parses `k_n` written as an affine expression in n: "2n", "2n+1", "n", "3".
inline induced_spec parse_induced_expression(const std::string& expr)
{
    std::string s;
    for (char ch : expr) {
        if (ch != ' ') {
            s.push_back(ch);
        }
    }
    induced_spec out;
    const auto npos = s.find('n');
    auto parse_int = [&](const std::string& t, std::int64_t fallback) -> std::int64_t {
        if (t.empty()) {
            return fallback;
        }
        std::int64_t v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
            throw config_error("--induced", "cannot parse '" + expr + "'");
        }
        return v;
    };
    if (npos == std::string::npos) {
        throw config_error("--induced", "expression must be affine in n, e.g. 2n+1");
    }
    out.slope = parse_int(s.substr(0, npos), 1);
    const std::string rest = s.substr(npos + 1);
    if (!rest.empty()) {
        if (rest[0] != '+') {
            throw config_error("--induced", "expected '+offset' after n in '" + expr + "'");
        }
        out.offset = parse_int(rest.substr(1), 0);
    }
    return out;
}

[[nodiscard]] inline run_config parse_config(const toml::table& root)
{
    using namespace detail;
    run_config c;
    const toml::table empty;

    if (const auto* sys = section(root, "system")) {
        const auto fam = get_or<std::string>(*sys, "system", "family", "logistic");
        if (fam == "logistic") {
            c.family = family_kind::logistic;
        } else if (fam == "tent") {
            c.family = family_kind::tent;
        } else if (fam == "affine") {
            c.family = family_kind::affine;
        } else {
            throw config_error("system.family", "unknown family '" + fam + "'");
        }
        c.offset = get_or<double>(*sys, "system", "offset", 0.0);
        if (const auto* p = section(*sys, "parameters")) {
            auto& ps = c.parameters;
            ps.kind = get_or<std::string>(*p, "system.parameters", "kind", "constant");
            ps.value = get_or<double>(*p, "system.parameters", "value", 0.0);
            ps.values = get_array<double>(*p, "system.parameters", "values", {});
            ps.low = get_or<double>(*p, "system.parameters", "low", 0.0);
            ps.high = get_or<double>(*p, "system.parameters", "high", 0.0);
            ps.seed = static_cast<std::uint64_t>(get_or<std::int64_t>(*p, "system.parameters", "seed", 0));
            ps.count = get_size(*p, "system.parameters", "count", 0);
        } else {
            throw config_error("system.parameters", "missing");
        }
        if (const auto* ind = section(*sys, "induced")) {
            induced_spec is;
            is.slope = get_or<std::int64_t>(*ind, "system.induced", "slope", 1);
            is.offset = get_or<std::int64_t>(*ind, "system.induced", "offset", 0);
            for (auto k : get_array<std::int64_t>(*ind, "system.induced", "ks", {})) {
                is.ks.push_back(static_cast<std::size_t>(k));
            }
            c.induced = is;
        }
    } else {
        throw config_error("system", "missing");
    }

    const auto* sets = section(root, "sets");
    if (sets == nullptr || sets->get("V") == nullptr) {
        throw config_error("sets.V", "missing");
    }
    {
        const auto* arr = sets->get("V")->as_array();
        if (arr == nullptr) {
            throw config_error(loc(*sets->get("V"), "sets.V"), "must be an array of interval lists");
        }
        for (std::size_t i = 0; i < arr->size(); ++i) {
            c.sets.push_back(read_intervals("sets.V[" + std::to_string(i) + "]", (*arr)[i]));
        }
        if (const auto* ov = sets->get("override")) {
            const auto* oarr = ov->as_array();
            if (oarr == nullptr) {
                throw config_error(loc(*ov, "sets.override"), "must be an array of tables");
            }
            for (std::size_t i = 0; i < oarr->size(); ++i) {
                const auto where = "sets.override[" + std::to_string(i) + "]";
                const auto* t = (*oarr)[i].as_table();
                if (t == nullptr || t->get("intervals") == nullptr) {
                    throw config_error(where, "needs symbol, index and intervals");
                }
                set_override_spec o;
                o.symbol_index = static_cast<symbol>(get_or<std::int64_t>(*t, where, "symbol", 1));
                o.index = get_size(*t, where, "index", 0);
                o.intervals = read_intervals(where + ".intervals", *t->get("intervals"));
                c.overrides.push_back(std::move(o));
            }
        }
    }

    const auto* tr = section(root, "transition");
    if (tr == nullptr || tr->get("matrix") == nullptr) {
        throw config_error("transition.matrix", "missing");
    }
    {
        const auto* rows = tr->get("matrix")->as_array();
        if (rows == nullptr) {
            throw config_error("transition.matrix", "must be an array of rows");
        }
        for (std::size_t i = 0; i < rows->size(); ++i) {
            const auto* row = (*rows)[i].as_array();
            if (row == nullptr) {
                throw config_error("transition.matrix[" + std::to_string(i) + "]", "must be an array");
            }
            std::vector<int> r;
            for (const auto& e : *row) {
                const auto v = e.value<std::int64_t>();
                if (!v) {
                    throw config_error(loc(e, "transition.matrix[" + std::to_string(i) + "]"),
                                       "entries must be integers");
                }
                r.push_back(static_cast<int>(*v));
            }
            c.matrix.push_back(std::move(r));
        }
    }

    const auto* v = section(root, "verify");
    const auto& vt = v ? *v : empty;
    c.horizon = get_size(vt, "verify", "horizon", c.horizon);
    c.strict_separation = get_or<bool>(vt, "verify", "strict_separation", c.strict_separation);
    if (vt.get("expansion_symbol") != nullptr) {
        c.expansion_symbol = static_cast<symbol>(get_or<std::int64_t>(vt, "verify", "expansion_symbol", 1));
    }
    c.cylinder_depth = get_size(vt, "verify", "cylinder_depth", c.cylinder_depth);
    c.cylinder_index_horizon = get_size(vt, "verify", "cylinder_index_horizon", c.cylinder_index_horizon);
    c.decay_threshold = get_or<double>(vt, "verify", "decay_threshold", c.decay_threshold);
    c.nonempty_word_length = get_size(vt, "verify", "nonempty_word_length", c.nonempty_word_length);
    c.require = get_array<std::string>(vt, "verify", "require", c.require);

    const auto* k = section(root, "construct");
    const auto& kt = k ? *k : empty;
    c.theorems = get_array<std::string>(kt, "construct", "theorems", c.theorems);
    c.selectors = get_array<double>(kt, "construct", "selectors", c.selectors);
    auto to_symbols = [](const std::vector<std::int64_t>& xs) {
        return std::vector<symbol>(xs.begin(), xs.end());
    };
    const std::vector<std::int64_t> beta_default(c.beta_cycle.begin(), c.beta_cycle.end());
    const std::vector<std::int64_t> gamma_default(c.gamma_cycle.begin(), c.gamma_cycle.end());
    c.beta_cycle = to_symbols(get_array<std::int64_t>(kt, "construct", "beta_cycle", beta_default));
    c.gamma_cycle = to_symbols(get_array<std::int64_t>(kt, "construct", "gamma_cycle", gamma_default));
    c.s0 = static_cast<symbol>(get_or<std::int64_t>(kt, "construct", "s0", c.s0));
    c.m_slope = get_or<std::int64_t>(kt, "construct", "m_slope", c.m_slope);
    c.m_offset = get_or<std::int64_t>(kt, "construct", "m_offset", c.m_offset);
    c.gamma_blocks = get_size(kt, "construct", "gamma_blocks", c.gamma_blocks);
    c.levels = get_size(kt, "construct", "levels", c.levels);
    c.witness_depth = get_size(kt, "construct", "witness_depth", c.witness_depth);
    c.prefix_length = get_size(kt, "construct", "prefix_length", c.prefix_length);

    const auto* s = section(root, "stats");
    const auto& st = s ? *s : empty;
    c.stats_horizon = get_size(st, "stats", "horizon", c.stats_horizon);
    c.window = get_size(st, "stats", "window", c.window);
    c.epsilon_count = get_size(st, "stats", "epsilon_count", c.epsilon_count);
    c.checkpoints = get_or<std::string>(st, "stats", "checkpoints", c.checkpoints);
    c.density_stride = get_size(st, "stats", "density_stride", c.density_stride);

    const auto* tol = section(root, "tolerances");
    const auto& tt = tol ? *tol : empty;
    c.tau = get_or<double>(tt, "tolerances", "tau", c.tau);
    c.inclusion_slack = get_or<double>(tt, "tolerances", "inclusion_slack", c.inclusion_slack);
    c.proximity = get_or<double>(tt, "tolerances", "proximity", c.proximity);
    c.separation = get_or<double>(tt, "tolerances", "separation", c.separation);
    c.expansion = get_or<double>(tt, "tolerances", "expansion", c.expansion);
    c.density = get_or<double>(tt, "tolerances", "density", c.density);

    if (const auto* o = section(root, "output")) {
        c.out_dir = get_or<std::string>(*o, "output", "dir", c.out_dir);
    }
    validate(c);
    return c;
}

[[nodiscard]] inline run_config parse_config_string(std::string_view text, std::string_view source = "config")
{
    try {
        return parse_config(toml::parse(text, source));
    } catch (const toml::parse_error& e) {
        const auto& b = e.source().begin;
        throw config_error(std::string(source) + ":" + std::to_string(b.line) + ":" + std::to_string(b.column),
                           std::string(e.description()));
    }
}

[[nodiscard]] inline run_config load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw config_error(path, "cannot open config file");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str(), path);
}

namespace detail {

inline toml::array endpoint_pair(const interval_spec& iv)
{
    toml::array a;
    for (const auto* e : {&iv.lower, &iv.upper}) {
        if (e->quoted) {
            a.push_back(e->text);
        } else {
            a.push_back(e->value);
        }
    }
    return a;
}

inline toml::array interval_list(const std::vector<interval_spec>& ivs)
{
    toml::array a;
    for (const auto& iv : ivs) {
        a.push_back(endpoint_pair(iv));
    }
    return a;
}

template <class T>
toml::array to_array(const std::vector<T>& xs)
{
    toml::array a;
    for (const auto& x : xs) {
        if constexpr (std::is_integral_v<T>) {
            a.push_back(static_cast<std::int64_t>(x));
        } else {
            a.push_back(x);
        }
    }
    return a;
}

} // namespace detail

[[nodiscard]] inline toml::table to_toml(const run_config& c)
{
    using detail::to_array;
    toml::table params{{"kind", c.parameters.kind}};
    if (c.parameters.kind == "constant") {
        params.insert("value", c.parameters.value);
    } else if (c.parameters.kind == "uniform") {
        params.insert("low", c.parameters.low);
        params.insert("high", c.parameters.high);
        params.insert("seed", static_cast<std::int64_t>(c.parameters.seed));
    } else {
        params.insert("values", to_array(c.parameters.values));
    }
    if (c.parameters.count != 0) {
        params.insert("count", static_cast<std::int64_t>(c.parameters.count));
    }
    toml::table system{{"family", to_string(c.family)}, {"parameters", params}};
    if (c.family == family_kind::affine) {
        system.insert("offset", c.offset);
    }
    if (c.induced) {
        toml::table ind;
        if (c.induced->ks.empty()) {
            ind.insert("slope", c.induced->slope);
            ind.insert("offset", c.induced->offset);
        } else {
            ind.insert("ks", to_array(c.induced->ks));
        }
        system.insert("induced", ind);
    }

    toml::array v;
    for (const auto& s : c.sets) {
        v.push_back(detail::interval_list(s));
    }
    toml::table sets{{"V", v}};
    if (!c.overrides.empty()) {
        toml::array ov;
        for (const auto& o : c.overrides) {
            ov.push_back(toml::table{{"symbol", static_cast<std::int64_t>(o.symbol_index)},
                                     {"index", static_cast<std::int64_t>(o.index)},
                                     {"intervals", detail::interval_list(o.intervals)}});
        }
        sets.insert("override", ov);
    }

    toml::array rows;
    for (const auto& r : c.matrix) {
        rows.push_back(to_array(r));
    }

    toml::table verify{{"horizon", static_cast<std::int64_t>(c.horizon)},
                       {"strict_separation", c.strict_separation},
                       {"cylinder_depth", static_cast<std::int64_t>(c.cylinder_depth)},
                       {"cylinder_index_horizon", static_cast<std::int64_t>(c.cylinder_index_horizon)},
                       {"decay_threshold", c.decay_threshold},
                       {"nonempty_word_length", static_cast<std::int64_t>(c.nonempty_word_length)},
                       {"require", to_array(c.require)}};
    if (c.expansion_symbol) {
        verify.insert("expansion_symbol", static_cast<std::int64_t>(*c.expansion_symbol));
    }

    toml::table construct{{"theorems", to_array(c.theorems)},
                          {"selectors", to_array(c.selectors)},
                          {"beta_cycle", to_array(c.beta_cycle)},
                          {"gamma_cycle", to_array(c.gamma_cycle)},
                          {"s0", static_cast<std::int64_t>(c.s0)},
                          {"m_slope", c.m_slope},
                          {"m_offset", c.m_offset},
                          {"gamma_blocks", static_cast<std::int64_t>(c.gamma_blocks)},
                          {"levels", static_cast<std::int64_t>(c.levels)},
                          {"witness_depth", static_cast<std::int64_t>(c.witness_depth)},
                          {"prefix_length", static_cast<std::int64_t>(c.prefix_length)}};

    toml::table stats{{"horizon", static_cast<std::int64_t>(c.stats_horizon)},
                      {"window", static_cast<std::int64_t>(c.window)},
                      {"epsilon_count", static_cast<std::int64_t>(c.epsilon_count)},
                      {"checkpoints", c.checkpoints},
                      {"density_stride", static_cast<std::int64_t>(c.density_stride)}};

    toml::table tolerances{{"tau", c.tau},
                           {"inclusion_slack", c.inclusion_slack},
                           {"proximity", c.proximity},
                           {"separation", c.separation},
                           {"expansion", c.expansion},
                           {"density", c.density}};

    return toml::table{{"system", system},        {"sets", sets},
                       {"transition", toml::table{{"matrix", rows}}},
                       {"verify", verify},        {"construct", construct},
                       {"stats", stats},          {"tolerances", tolerances},
                       {"output", toml::table{{"dir", c.out_dir}}}};
}

[[nodiscard]] inline std::string serialize_config(const run_config& c)
{
    std::ostringstream os;
    os << toml::toml_formatter(to_toml(c));
    return os.str() + "\n";
}

// Library objects described by a configuration.
[[nodiscard]] inline interval_union build_union(const std::vector<interval_spec>& ivs)
{
    std::vector<interval> parts;
    for (const auto& iv : ivs) {
        parts.push_back({iv.lower.value, iv.upper.value});
    }
    return interval_union(std::move(parts));
}

[[nodiscard]] inline transition_matrix build_matrix(const run_config& c) { return transition_matrix(c.matrix); }

// `extent` is the number of base-map indices that must be defined.
[[nodiscard]] inline map_family_ptr build_base_family(const run_config& c, std::size_t extent)
{
    const auto& p = c.parameters;
    parameter_sequence seq = parameter_sequence::constant(p.value);
    if (p.kind == "periodic") {
        seq = parameter_sequence::periodic(p.values);
    } else if (p.kind == "list") {
        seq = parameter_sequence::list(p.values);
    } else if (p.kind == "uniform") {
        seq = parameter_sequence::uniform(p.low, p.high, p.seed, p.count != 0 ? p.count : extent);
    }
    return std::make_shared<const map_family>(c.family, std::move(seq), c.offset);
}

[[nodiscard]] inline std::optional<index_subsequence> build_subsequence(const run_config& c)
{
    if (!c.induced) {
        return std::nullopt;
    }
    if (!c.induced->ks.empty()) {
        return index_subsequence::explicit_list(c.induced->ks);
    }
    return index_subsequence::affine(c.induced->slope, c.induced->offset);
}

// The system the pipeline runs on: the base family or its induced system.
// `horizon` is the largest index (of that system) that will be evaluated.
[[nodiscard]] inline map_family_ptr build_family(const run_config& c, std::size_t horizon)
{
    const auto ks = build_subsequence(c);
    std::size_t extent = horizon + 1;
    if (ks) {
        extent = ks->at(horizon + 1) + 1;
    }
    auto base = build_base_family(c, extent);
    if (!ks) {
        return base;
    }
    return std::make_shared<const map_family>(induced_system(base, *ks));
}

} // namespace ndschaos

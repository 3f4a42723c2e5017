#pragma once

// Hypothesis checks (coupled expansion, separation, expansion constants,
// uniform Lipschitz bounds) and cylinder-set enclosures
//   V_alpha^{m,n} = cap_{k=0}^{m} f_n^{-k}(V_{a_k, n+k}).

#include "ndschaos/error.hpp"
#include "ndschaos/interval.hpp"
#include "ndschaos/symbolic.hpp"
#include "ndschaos/system.hpp"
#include "ndschaos/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ndschaos {

inline constexpr double default_inclusion_slack = 1e-9;

// Per-symbol sets V_i with optional per-index refinements V_{i,n} (subsets of V_i).
class set_family {
public:
    explicit set_family(std::vector<interval_union> base) : base_(std::move(base))
    {
        if (base_.size() < 2) {
            throw config_error("sets", "at least two symbol sets are required");
        }
        for (std::size_t i = 0; i < base_.size(); ++i) {
            if (base_[i].empty()) {
                throw config_error("sets.V[" + std::to_string(i + 1) + "]", "set is empty");
            }
        }
    }

    void set_override(symbol i, std::size_t n, interval_union v)
    {
        if (v.empty()) {
            throw config_error("sets.override", "V_" + std::to_string(i) + "," + std::to_string(n) + " is empty");
        }
        if (!base(i).contains(v)) {
            throw config_error("sets.override",
                               "V_" + std::to_string(i) + "," + std::to_string(n) + " is not a subset of V_" +
                                   std::to_string(i));
        }
        overrides_[{i, n}] = std::move(v);
    }

    [[nodiscard]] std::size_t size() const noexcept { return base_.size(); }
    [[nodiscard]] const interval_union& base(symbol i) const { return base_.at(static_cast<std::size_t>(i - 1)); }
    [[nodiscard]] const std::vector<interval_union>& bases() const noexcept { return base_; }
    [[nodiscard]] bool has_overrides() const noexcept { return !overrides_.empty(); }
    [[nodiscard]] const std::map<std::pair<symbol, std::size_t>, interval_union>& overrides() const noexcept
    {
        return overrides_;
    }

    [[nodiscard]] const interval_union& at(symbol i, std::size_t n) const
    {
        if (!overrides_.empty()) {
            if (auto it = overrides_.find({i, n}); it != overrides_.end()) {
                return it->second;
            }
        }
        return base(i);
    }

    [[nodiscard]] interval_union all_bases() const
    {
        interval_union u;
        for (const auto& b : base_) {
            u = u.unite(b);
        }
        return u;
    }

private:
    std::vector<interval_union> base_;
    std::map<std::pair<symbol, std::size_t>, interval_union> overrides_;
};

struct index_result {
    std::size_t n = 0;
    bool passed = true;
    double margin = 0.0;
};

struct verdict {
    std::string hypothesis;
    bool passed = true;
    bool horizon_limited = true;
    std::map<std::string, double> margins;
    std::vector<index_result> per_index;
    std::vector<std::string> notes;
};

[[nodiscard]] inline double delta_separation(const set_family& v)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            best = std::min(best, distance(v.bases()[i], v.bases()[j]));
        }
    }
    return best;
}

// f_n(V_{i,n}) must contain every V_{j,n+1} with a_ij = 1, within
// `inclusion_slack`; sets must be separated (d > 0 when strict, interiors
// disjoint otherwise). Overlapping interiors throw separation_violated.
[[nodiscard]] inline verdict check_coupled_expansion(const map_family& f, const set_family& v,
                                                     const transition_matrix& a, std::size_t horizon, bool strict,
                                                     double inclusion_slack = default_inclusion_slack)
{
    if (a.size() != v.size()) {
        throw config_error("sets", "number of sets differs from matrix size");
    }
    verdict out;
    out.hypothesis = strict ? "strict coupled expansion" : "coupled expansion";
    const auto n_sym = static_cast<symbol>(v.size());
    double min_slack = std::numeric_limits<double>::infinity();
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < horizon; ++n) {
        const bool check_sets = n == 0 || v.has_overrides();
        double gap_n = std::numeric_limits<double>::infinity();
        if (check_sets) {
            for (symbol i = 1; i <= n_sym; ++i) {
                for (symbol j = i + 1; j <= n_sym; ++j) {
                    const auto& vi = v.at(i, n);
                    const auto& vj = v.at(j, n);
                    if (vi.overlap_measure(vj) > 0.0) {
                        throw separation_violated(static_cast<std::size_t>(i), static_cast<std::size_t>(j), n);
                    }
                    gap_n = std::min(gap_n, distance(vi, vj));
                }
            }
            min_gap = std::min(min_gap, gap_n);
        }
        double slack_n = std::numeric_limits<double>::infinity();
        for (symbol i = 1; i <= n_sym; ++i) {
            const auto img = image_of_union(f, n, v.at(i, n));
            for (symbol j = 1; j <= n_sym; ++j) {
                if (a.allows(i, j)) {
                    slack_n = std::min(slack_n, img.covering_slack(v.at(j, n + 1)));
                }
            }
        }
        min_slack = std::min(min_slack, slack_n);
        const bool ok = slack_n >= -inclusion_slack && (!strict || !check_sets || gap_n > 0.0);
        out.per_index.push_back({n, ok, slack_n});
        out.passed = out.passed && ok;
    }
    if (strict && !(min_gap > 0.0)) {
        out.passed = false;
        out.notes.push_back("strict separation requires positive distance between sets");
    }
    out.margins["min_inclusion_slack"] = min_slack;
    out.margins["min_separation"] = min_gap;
    out.margins["inclusion_tolerance"] = inclusion_slack;
    return out;
}

namespace detail {

// inf of min |f'| over the scoped sets for one closed-form map at index n.
inline double min_slope(const map_family& f, std::size_t n, const set_family& v, std::optional<symbol> only)
{
    double lam = std::numeric_limits<double>::infinity();
    for (symbol i = 1; i <= static_cast<symbol>(v.size()); ++i) {
        if (only && *only != i) {
            continue;
        }
        for (const auto& c : v.at(i, n)) {
            lam = std::min(lam, derivative_bounds(f, n, c).first);
        }
    }
    return lam;
}

inline double max_slope(const map_family& f, std::size_t n, const set_family& v)
{
    double l = 0.0;
    for (symbol i = 1; i <= static_cast<symbol>(v.size()); ++i) {
        for (const auto& c : v.at(i, n)) {
            l = std::max(l, derivative_bounds(f, n, c).second);
        }
    }
    return l;
}

// Parameter values at which |f'| attains its extremes over a declared range.
inline std::vector<double> extreme_parameters(std::pair<double, double> range)
{
    std::vector<double> rs{range.first, range.second};
    if (range.first < 0.0 && range.second > 0.0) {
        rs.push_back(0.0);
    }
    return rs;
}

} // namespace detail

// Expansion constant lambda = inf min |f_n'| over the scoped sets. With a
// closed-form family the parameter range is folded in, which makes the bound
// valid for every n rather than only n < horizon.
[[nodiscard]] inline verdict check_expansion(const map_family& f, const set_family& v, const transition_matrix& a,
                                             std::size_t horizon, std::optional<symbol> only_symbol,
                                             double tolerance = 1e-12)
{
    if (only_symbol && !a.allows(*only_symbol, *only_symbol)) {
        throw loop_missing(static_cast<std::size_t>(*only_symbol));
    }
    verdict out;
    out.hypothesis = only_symbol ? "expansion on V_" + std::to_string(*only_symbol) : "expansion on all sets";
    double lam_h = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < horizon; ++n) {
        const double lam_n = detail::min_slope(f, n, v, only_symbol);
        lam_h = std::min(lam_h, lam_n);
        out.per_index.push_back({n, lam_n > 1.0 + tolerance, lam_n});
    }
    double lam = lam_h;
    out.margins["lambda_horizon"] = lam_h;
    if (auto range = f.parameter_range()) {
        double lam_r = std::numeric_limits<double>::infinity();
        for (double r : detail::extreme_parameters(*range)) {
            const auto fr = f.with_parameter(r);
            const set_family base_only(v.bases());
            lam_r = std::min(lam_r, detail::min_slope(fr, 0, base_only, only_symbol));
        }
        out.margins["lambda_range"] = lam_r;
        lam = std::min(lam, lam_r);
        out.horizon_limited = false;
    }
    out.margins["lambda"] = lam;
    out.passed = lam > 1.0 + tolerance;
    return out;
}

// Uniform Lipschitz modulus L = sup max |f_n'| over the union of the sets,
// the finite surrogate for equi-continuity.
[[nodiscard]] inline verdict equicontinuity_bound(const map_family& f, const set_family& v, std::size_t horizon)
{
    verdict out;
    out.hypothesis = "equi-continuity (uniform Lipschitz bound)";
    double l_h = 0.0;
    for (std::size_t n = 0; n < horizon; ++n) {
        const double l_n = detail::max_slope(f, n, v);
        l_h = std::max(l_h, l_n);
        out.per_index.push_back({n, std::isfinite(l_n), l_n});
    }
    double l = l_h;
    out.margins["lipschitz_horizon"] = l_h;
    if (auto range = f.parameter_range()) {
        double l_r = 0.0;
        for (double r : detail::extreme_parameters(*range)) {
            l_r = std::max(l_r, detail::max_slope(f.with_parameter(r), 0, set_family(v.bases())));
        }
        out.margins["lipschitz_range"] = l_r;
        l = std::max(l, l_r);
        out.horizon_limited = false;
    }
    out.margins["lipschitz"] = l;
    out.passed = std::isfinite(l);
    return out;
}

struct cylinder_enclosure {
    symbol_word prefix;
    std::size_t base_index = 0;
    interval_union set;
    std::size_t depth = 0; // m = |prefix| - 1
    double diameter = 0.0;
    bool allowable = true;

    [[nodiscard]] bool empty() const noexcept { return set.empty(); }
};

// Backward induction C_m = V_{a_m,n+m}, C_k = V_{a_k,n+k} cap f_{n+k}^{-1}(C_{k+1}).
[[nodiscard]] inline cylinder_enclosure cylinder(const map_family& f, const set_family& v,
                                                 const symbol_word& prefix, std::size_t n, double tau = default_tau)
{
    if (prefix.empty()) {
        throw config_error("cylinder", "prefix is empty");
    }
    cylinder_enclosure out;
    out.prefix = prefix;
    out.base_index = n;
    out.depth = prefix.size() - 1;
    interval_union cur = v.at(prefix.back(), n + out.depth);
    for (std::size_t k = out.depth; k-- > 0;) {
        cur = preimage_in_union(f, n + k, cur, v.at(prefix[k], n + k), tau);
        if (cur.empty()) {
            break;
        }
    }
    out.set = std::move(cur);
    out.diameter = out.set.diameter();
    return out;
}

// As above, flagging prefixes that are not allowable for `a`.
[[nodiscard]] inline cylinder_enclosure cylinder(const map_family& f, const set_family& v,
                                                 const transition_matrix& a, const symbol_word& prefix,
                                                 std::size_t n, double tau = default_tau)
{
    auto c = cylinder(f, v, prefix, n, tau);
    c.allowable = is_allowable(a, prefix);
    return c;
}

struct decay_profile {
    std::vector<std::vector<double>> diameter; // [n][m]
    std::vector<double> max_over_index;        // [m]
    bool non_increasing = true;
    bool below_threshold = false;
    double threshold = 0.0;
    [[nodiscard]] bool passed() const noexcept { return non_increasing && below_threshold; }

    // Smallest m with max_n d(V^{m,n}) < eps, if any.
    [[nodiscard]] std::optional<std::size_t> stabilization_depth(double eps) const
    {
        for (std::size_t m = 0; m < max_over_index.size(); ++m) {
            if (max_over_index[m] < eps) {
                return m;
            }
        }
        return std::nullopt;
    }
};

// d(V_gamma^{m,n}) for m <= max_depth, n <= index_horizon, gamma periodic with the given cycle.
[[nodiscard]] inline decay_profile cylinder_decay_profile(const map_family& f, const set_family& v,
                                                          const symbol_word& cycle, std::size_t max_depth,
                                                          std::size_t index_horizon, double threshold,
                                                          double tau = default_tau)
{
    const auto gamma = symbol_stream::periodic(cycle);
    decay_profile out;
    out.threshold = threshold;
    out.max_over_index.assign(max_depth + 1, 0.0);
    for (std::size_t n = 0; n <= index_horizon; ++n) {
        std::vector<double> row(max_depth + 1, 0.0);
        for (std::size_t m = 0; m <= max_depth; ++m) {
            row[m] = cylinder(f, v, gamma.prefix(m + 1), n, tau).diameter;
            out.max_over_index[m] = std::max(out.max_over_index[m], row[m]);
        }
        out.diameter.push_back(std::move(row));
    }
    for (std::size_t m = 1; m <= max_depth; ++m) {
        out.non_increasing = out.non_increasing && out.max_over_index[m] <= out.max_over_index[m - 1];
    }
    out.below_threshold = out.max_over_index[max_depth] < threshold;
    return out;
}

struct witness {
    double point = 0.0;
    cylinder_enclosure enclosure;
    [[nodiscard]] double width() const noexcept { return enclosure.diameter; }
};

namespace detail {

inline double representative(const interval_union& s)
{
    const double mid = s.hull().midpoint();
    return s.contains(mid) ? mid : s[0].midpoint();
}

} // namespace detail

// Midpoint of the depth-m cylinder of the stream at index 0. Throws
// empty_cylinder carrying the first depth at which the cylinder vanishes.
[[nodiscard]] inline witness witness_point(const map_family& f, const set_family& v, const symbol_stream& stream,
                                           std::size_t depth, std::size_t base_index = 0,
                                           double tau = default_tau)
{
    auto c = cylinder(f, v, stream.window(base_index, depth + 1), base_index, tau);
    if (c.empty()) {
        std::size_t lo = 0;
        std::size_t hi = depth; // cylinder at hi is empty
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (cylinder(f, v, stream.window(base_index, mid + 1), base_index, tau).empty()) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        throw empty_cylinder(hi);
    }
    const double x = detail::representative(c.set);
    return {x, std::move(c)};
}

namespace detail {

inline void enumerate_words(const transition_matrix& a, std::size_t length, symbol_word& cur,
                            std::vector<symbol_word>& out)
{
    if (cur.size() == length) {
        out.push_back(cur);
        return;
    }
    for (symbol s = 1; s <= static_cast<symbol>(a.size()); ++s) {
        if (cur.empty() || a.allows(cur.back(), s)) {
            cur.push_back(s);
            enumerate_words(a, length, cur, out);
            cur.pop_back();
        }
    }
}

} // namespace detail

[[nodiscard]] inline std::vector<symbol_word> allowable_words(const transition_matrix& a, std::size_t length)
{
    std::vector<symbol_word> out;
    symbol_word cur;
    detail::enumerate_words(a, length, cur, out);
    return out;
}

// Nonemptiness of V_alpha^{m,n} for every allowable word of the given length
// and every listed base index (the finite form of the cylinder assumption).
[[nodiscard]] inline verdict check_cylinders_nonempty(const map_family& f, const set_family& v,
                                                      const transition_matrix& a, std::size_t word_length,
                                                      const std::vector<std::size_t>& base_indices,
                                                      double tau = default_tau)
{
    verdict out;
    out.hypothesis = "nonempty cylinders";
    const auto words = allowable_words(a, word_length);
    double min_diam = std::numeric_limits<double>::infinity();
    std::size_t empties = 0;
    for (std::size_t n : base_indices) {
        bool ok = true;
        double md = std::numeric_limits<double>::infinity();
        for (const auto& w : words) {
            const auto c = cylinder(f, v, w, n, tau);
            if (c.empty()) {
                ok = false;
                ++empties;
            } else {
                md = std::min(md, c.diameter);
            }
        }
        min_diam = std::min(min_diam, md);
        out.per_index.push_back({n, ok, md});
        out.passed = out.passed && ok;
    }
    out.margins["words_tested"] = static_cast<double>(words.size() * base_indices.size());
    out.margins["empty_cylinders"] = static_cast<double>(empties);
    out.margins["min_diameter"] = min_diam;
    return out;
}

} // namespace ndschaos

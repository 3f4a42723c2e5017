#pragma once

// Non-autonomous interval map families x_{n+1} = f_n(x_n): closed-form
// piecewise-monotone families, parameter sequences, induced (block-composed)
// systems, and exact interval images / bisection preimages.

#include "ndschaos/error.hpp"
#include "ndschaos/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ndschaos {

inline constexpr double default_tau = 1e-12;

class parameter_sequence {
public:
    enum class kind { constant, periodic, uniform, list };

    static parameter_sequence constant(double r)
    {
        parameter_sequence p;
        p.kind_ = kind::constant;
        p.values_ = {r};
        p.low_ = p.high_ = r;
        return p;
    }

    static parameter_sequence periodic(std::vector<double> cycle)
    {
        if (cycle.empty()) {
            throw config_error("parameter", "periodic parameter list is empty");
        }
        parameter_sequence p;
        p.kind_ = kind::periodic;
        p.values_ = std::move(cycle);
        p.set_range_from_values();
        return p;
    }

    static parameter_sequence list(std::vector<double> values)
    {
        if (values.empty()) {
            throw config_error("parameter", "explicit parameter list is empty");
        }
        parameter_sequence p;
        p.kind_ = kind::list;
        p.values_ = std::move(values);
        p.set_range_from_values();
        return p;
    }

    // `count` values drawn uniformly from [low, high] with a seeded
    // mt19937_64; materialized up front so evaluation order never matters.
    static parameter_sequence uniform(double low, double high, std::uint64_t seed, std::size_t count)
    {
        if (!(low <= high)) {
            throw config_error("parameter", "uniform range has low > high");
        }
        parameter_sequence p;
        p.kind_ = kind::uniform;
        p.low_ = low;
        p.high_ = high;
        p.seed_ = seed;
        p.values_.resize(count);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(low, high);
        for (auto& v : p.values_) {
            v = low == high ? low : dist(rng);
        }
        return p;
    }

    [[nodiscard]] double at(std::size_t n) const
    {
        switch (kind_) {
        case kind::constant: return values_[0];
        case kind::periodic: return values_[n % values_.size()];
        case kind::uniform:
        case kind::list:
            if (n >= values_.size()) {
                throw parameter_out_of_range("parameter index " + std::to_string(n) + " beyond the " +
                                             std::to_string(values_.size()) + " materialized values");
            }
            return values_[n];
        }
        return values_[0];
    }

    [[nodiscard]] kind type() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    // Closed range containing every value of the sequence, for all n.
    [[nodiscard]] std::pair<double, double> range() const noexcept { return {low_, high_}; }
    // Number of indices with a defined value; 0 means unbounded.
    [[nodiscard]] std::size_t extent() const noexcept
    {
        return kind_ == kind::uniform || kind_ == kind::list ? values_.size() : 0;
    }

private:
    void set_range_from_values()
    {
        low_ = *std::min_element(values_.begin(), values_.end());
        high_ = *std::max_element(values_.begin(), values_.end());
    }

    kind kind_ = kind::constant;
    std::vector<double> values_;
    double low_ = 0.0;
    double high_ = 0.0;
    std::uint64_t seed_ = 0;
};

enum class family_kind { logistic, tent, affine };

[[nodiscard]] inline std::string to_string(family_kind k)
{
    switch (k) {
    case family_kind::logistic: return "logistic";
    case family_kind::tent: return "tent";
    case family_kind::affine: return "affine";
    }
    return "?";
}

// Increasing index subsequence k_1 < k_2 < ... with k_0 := 0, given either as
// k_n = slope * n + offset or as an explicit list.
class index_subsequence {
public:
    static index_subsequence affine(std::int64_t slope, std::int64_t offset)
    {
        if (slope < 1 || slope + offset < 1) {
            throw not_increasing("subsequence k_n = " + std::to_string(slope) + "n + " + std::to_string(offset) +
                                 " must be strictly increasing with k_1 >= 1");
        }
        index_subsequence s;
        s.slope_ = slope;
        s.offset_ = offset;
        return s;
    }

    static index_subsequence explicit_list(std::vector<std::size_t> ks)
    {
        if (ks.empty() || ks.front() < 1) {
            throw not_increasing("subsequence must start with k_1 >= 1");
        }
        for (std::size_t i = 1; i < ks.size(); ++i) {
            if (ks[i] <= ks[i - 1]) {
                throw not_increasing("subsequence is not strictly increasing at position " + std::to_string(i + 1));
            }
        }
        index_subsequence s;
        s.list_ = std::move(ks);
        return s;
    }

    // k_n; k_0 = 0.
    [[nodiscard]] std::size_t at(std::size_t n) const
    {
        if (n == 0) {
            return 0;
        }
        if (!list_.empty()) {
            if (n > list_.size()) {
                throw parameter_out_of_range("subsequence index " + std::to_string(n) + " beyond explicit list");
            }
            return list_[n - 1];
        }
        return static_cast<std::size_t>(slope_ * static_cast<std::int64_t>(n) + offset_);
    }

    [[nodiscard]] bool is_affine() const noexcept { return list_.empty(); }
    [[nodiscard]] std::int64_t slope() const noexcept { return slope_; }
    [[nodiscard]] std::int64_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::size_t>& list() const noexcept { return list_; }

private:
    std::int64_t slope_ = 1;
    std::int64_t offset_ = 0;
    std::vector<std::size_t> list_;
};

class map_family;
using map_family_ptr = std::shared_ptr<const map_family>;

// f_n(x) = r_n x (1 - x)  |  r_n min(x, 1 - x)  |  r_n x + offset
class map_family {
public:
    struct closed_form {
        family_kind kind;
        parameter_sequence params;
        double offset = 0.0;
    };
    struct induced {
        map_family_ptr base;
        index_subsequence ks;
    };

    map_family(family_kind kind, parameter_sequence params, double offset = 0.0)
        : def_(closed_form{kind, std::move(params), offset}) {}
    map_family(map_family_ptr base, index_subsequence ks) : def_(induced{std::move(base), std::move(ks)}) {}

    [[nodiscard]] bool is_induced() const noexcept { return std::holds_alternative<induced>(def_); }
    [[nodiscard]] const closed_form& base_form() const { return std::get<closed_form>(def_); }
    [[nodiscard]] const induced& induced_form() const { return std::get<induced>(def_); }

    // Same family with the parameter frozen at r (closed forms only).
    [[nodiscard]] map_family with_parameter(double r) const
    {
        const auto& cf = base_form();
        return {cf.kind, parameter_sequence::constant(r), cf.offset};
    }

    // Range of parameter values over all n, when the family is closed-form.
    [[nodiscard]] std::optional<std::pair<double, double>> parameter_range() const
    {
        if (is_induced()) {
            return std::nullopt;
        }
        return base_form().params.range();
    }

    [[nodiscard]] double parameter(std::size_t n) const { return base_form().params.at(n); }

    [[nodiscard]] double value(std::size_t n, double x) const
    {
        if (const auto* cf = std::get_if<closed_form>(&def_)) {
            const double r = cf->params.at(n);
            switch (cf->kind) {
            case family_kind::logistic: return r * x * (1.0 - x);
            case family_kind::tent: return r * std::min(x, 1.0 - x);
            case family_kind::affine: return r * x + cf->offset;
            }
        }
        const auto& ind = std::get<induced>(def_);
        for (std::size_t m = ind.ks.at(n); m < ind.ks.at(n + 1); ++m) {
            x = ind.base->value(m, x);
        }
        return x;
    }

    // Interior critical points of the closed form (the real line splits into
    // monotone pieces there).
    [[nodiscard]] std::vector<double> own_breakpoints() const
    {
        const auto& cf = base_form();
        if (cf.kind == family_kind::affine) {
            return {};
        }
        return {0.5};
    }

    // |f_n'(x)| for closed forms (one-sided value at the tent apex).
    [[nodiscard]] double abs_derivative(std::size_t n, double x) const
    {
        const auto& cf = base_form();
        const double r = cf.params.at(n);
        switch (cf.kind) {
        case family_kind::logistic: return std::abs(r * (1.0 - 2.0 * x));
        case family_kind::tent:
        case family_kind::affine: return std::abs(r);
        }
        return 0.0;
    }

    // The closed-form maps making up f_n, in application order.
    [[nodiscard]] std::vector<std::pair<const map_family*, std::size_t>> components(std::size_t n) const
    {
        if (!is_induced()) {
            return {{this, n}};
        }
        const auto& ind = std::get<induced>(def_);
        std::vector<std::pair<const map_family*, std::size_t>> out;
        for (std::size_t m = ind.ks.at(n); m < ind.ks.at(n + 1); ++m) {
            auto inner = ind.base->components(m);
            out.insert(out.end(), inner.begin(), inner.end());
        }
        return out;
    }

private:
    std::variant<closed_form, induced> def_;
};

[[nodiscard]] inline double evaluate(const map_family& f, std::size_t n, double x) { return f.value(n, x); }

// f_i^n(x) = f_{i+n-1} o ... o f_i (x); the identity for n = 0.
[[nodiscard]] inline double compose_forward(const map_family& f, std::size_t i, std::size_t n, double x,
                                            double magnitude_bound = 1e12)
{
    for (std::size_t k = 0; k < n; ++k) {
        x = f.value(i + k, x);
        if (!std::isfinite(x) || std::abs(x) > magnitude_bound) {
            throw overflow_guard(k + 1, x);
        }
    }
    return x;
}

[[nodiscard]] inline map_family induced_system(map_family_ptr base, index_subsequence ks)
{
    return {std::move(base), std::move(ks)};
}

namespace detail {

// Sorted monotone pieces of a closed-form map on J.
inline std::vector<interval> monotone_pieces(const map_family& g, const interval& j)
{
    std::vector<interval> pieces;
    double lo = j.lower;
    for (double b : g.own_breakpoints()) {
        if (b > lo && b < j.upper) {
            pieces.push_back({lo, b});
            lo = b;
        }
    }
    pieces.push_back({lo, j.upper});
    return pieces;
}

inline interval closed_image(const map_family& g, std::size_t n, const interval& j)
{
    double lo = std::min(g.value(n, j.lower), g.value(n, j.upper));
    double hi = std::max(g.value(n, j.lower), g.value(n, j.upper));
    for (double b : g.own_breakpoints()) {
        if (b > j.lower && b < j.upper) {
            const double v = g.value(n, b);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

// Outward bracket of the root of h(x) = c on [a, b] for increasing h with
// h(a) < c <= h(b). The number of halvings depends only on (b - a) and tau, so
// brackets for different c lie on one dyadic grid and are monotone in c.
template <class H>
inline std::pair<double, double> bisect(H&& h, double a, double b, double c, double tau)
{
    const double w = b - a;
    const int steps = w > tau ? static_cast<int>(std::ceil(std::log2(w / tau))) : 0;
    double lo = a;
    double hi = b;
    for (int s = 0; s < steps; ++s) {
        const double mid = lo + 0.5 * (hi - lo);
        const double v = h(mid);
        if (!std::isfinite(v)) {
            throw tolerance_unreachable("non-finite map value during bisection at x = " + std::to_string(mid));
        }
        if (v < c) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

// {x in piece : c <= g(x) <= d} for a closed form monotone on `piece`.
inline std::optional<interval> piece_preimage(const map_family& g, std::size_t n, const interval& piece,
                                              const interval& target, double tau)
{
    const double fa = g.value(n, piece.lower);
    const double fb = g.value(n, piece.upper);
    if (!std::isfinite(fa) || !std::isfinite(fb)) {
        throw tolerance_unreachable("non-finite map value at a branch endpoint");
    }
    const bool increasing = fb >= fa;
    // Work with h = +-g so that h is increasing and the target is [c, d].
    const double sign = increasing ? 1.0 : -1.0;
    auto h = [&](double x) { return sign * g.value(n, x); };
    const double ha = sign * fa;
    const double hb = sign * fb;
    const double c = increasing ? target.lower : -target.upper;
    const double d = increasing ? target.upper : -target.lower;
    if (d < ha || c > hb) {
        return std::nullopt;
    }
    const double lo = c <= ha ? piece.lower : bisect(h, piece.lower, piece.upper, c, tau).first;
    // upper end: largest x with h(x) <= d, outward.
    const double hi = d >= hb ? piece.upper : bisect(h, piece.lower, piece.upper, d, tau).second;
    if (lo > hi) {
        return std::nullopt;
    }
    return interval{lo, hi};
}

inline interval_union closed_preimage(const map_family& g, std::size_t n, const interval_union& target,
                                      const interval& domain, double tau)
{
    std::vector<interval> out;
    for (const auto& piece : monotone_pieces(g, domain)) {
        for (const auto& t : target) {
            if (auto p = piece_preimage(g, n, piece, t, tau)) {
                out.push_back(*p);
            }
        }
    }
    return interval_union(std::move(out));
}

} // namespace detail

// f_n(J): exact for closed forms (endpoint and critical values), composed
// image-by-image for induced systems.
[[nodiscard]] inline interval image_of_interval(const map_family& f, std::size_t n, const interval& j)
{
    interval cur = j;
    for (const auto& [g, m] : f.components(n)) {
        cur = detail::closed_image(*g, m, cur);
    }
    return cur;
}

[[nodiscard]] inline interval_union image_of_union(const map_family& f, std::size_t n, const interval_union& u)
{
    std::vector<interval> parts;
    for (const auto& p : u) {
        parts.push_back(image_of_interval(f, n, p));
    }
    return interval_union(std::move(parts));
}

// {x in domain : f_n(x) in target}, with endpoints bracketed outward to tau.
[[nodiscard]] inline interval_union preimage_in_interval(const map_family& f, std::size_t n,
                                                         const interval_union& target, const interval& domain,
                                                         double tau = default_tau)
{
    const auto comps = f.components(n);
    std::vector<interval> domains{domain};
    for (std::size_t q = 0; q + 1 < comps.size(); ++q) {
        domains.push_back(detail::closed_image(*comps[q].first, comps[q].second, domains.back()));
    }
    interval_union cur = target;
    for (std::size_t q = comps.size(); q-- > 0;) {
        if (cur.empty()) {
            break;
        }
        cur = detail::closed_preimage(*comps[q].first, comps[q].second, cur, domains[q], tau);
    }
    return cur;
}

[[nodiscard]] inline interval_union preimage_in_union(const map_family& f, std::size_t n,
                                                      const interval_union& target, const interval_union& domain,
                                                      double tau = default_tau)
{
    std::vector<interval> parts;
    for (const auto& d : domain) {
        const auto p = preimage_in_interval(f, n, target, d, tau);
        parts.insert(parts.end(), p.begin(), p.end());
    }
    return interval_union(std::move(parts));
}

// (min |f_n'|, max |f_n'|) on J. Exact for closed forms; for induced systems
// the chain-rule product of per-component bounds over successive images.
[[nodiscard]] inline std::pair<double, double> derivative_bounds(const map_family& f, std::size_t n,
                                                                 const interval& j)
{
    double lo_total = 1.0;
    double hi_total = 1.0;
    interval cur = j;
    for (const auto& [g, m] : f.components(n)) {
        double lo = std::min(g->abs_derivative(m, cur.lower), g->abs_derivative(m, cur.upper));
        double hi = std::max(g->abs_derivative(m, cur.lower), g->abs_derivative(m, cur.upper));
        if (g->base_form().kind == family_kind::logistic && cur.contains(0.5)) {
            lo = 0.0;
        }
        lo_total *= lo;
        hi_total *= hi;
        cur = detail::closed_image(*g, m, cur);
    }
    return {lo_total, hi_total};
}

// Critical points of f_n inside J (breakpoints of the composed structure,
// propagated back through earlier components by preimage).
[[nodiscard]] inline std::vector<double> breakpoints(const map_family& f, std::size_t n, const interval& j,
                                                     double tau = default_tau)
{
    const auto comps = f.components(n);
    std::vector<double> found;
    std::vector<interval> domains{j};
    for (std::size_t q = 0; q + 1 < comps.size(); ++q) {
        domains.push_back(detail::closed_image(*comps[q].first, comps[q].second, domains.back()));
    }
    for (std::size_t q = 0; q < comps.size(); ++q) {
        for (double b : comps[q].first->own_breakpoints()) {
            if (!(b > domains[q].lower && b < domains[q].upper)) {
                continue;
            }
            interval_union pts(interval{b, b});
            for (std::size_t back = q; back-- > 0;) {
                pts = detail::closed_preimage(*comps[back].first, comps[back].second, pts, domains[back], tau);
            }
            for (const auto& p : pts) {
                found.push_back(p.midpoint());
            }
        }
    }
    std::sort(found.begin(), found.end());
    return found;
}

} // namespace ndschaos

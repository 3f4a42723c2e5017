#pragma once

// Orbit traces and orbit-pair statistics: Li-Yorke proximality/separation and
// the counting densities of distributional chaos along a checkpoint sequence.

#include "ndschaos/error.hpp"
#include "ndschaos/symbolic.hpp"
#include "ndschaos/system.hpp"
#include "ndschaos/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ndschaos {

struct orbit_options {
    double bounded_radius = 1e3;
    double overflow_guard = 1e12;
};

struct orbit_trace {
    double initial = 0.0;
    std::vector<double> values; // x_0 .. x_H
    // Enclosure width of each value around the true orbit point; empty for
    // plain forward iteration.
    std::vector<double> widths;
    bool bounded = true;
    double radius = 0.0;

    [[nodiscard]] std::size_t horizon() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    [[nodiscard]] double width(std::size_t n) const noexcept { return widths.empty() ? 0.0 : widths[n]; }
};

// Forward iteration x_{n+1} = f_n(x_n) for n < H.
[[nodiscard]] inline orbit_trace orbit(const map_family& f, double x0, std::size_t horizon,
                                       const orbit_options& opts = {})
{
    if (horizon < 1) {
        throw config_error("orbit", "horizon must be >= 1");
    }
    orbit_trace t;
    t.initial = x0;
    t.radius = opts.bounded_radius;
    t.values.reserve(horizon + 1);
    t.values.push_back(x0);
    double x = x0;
    for (std::size_t n = 0; n < horizon; ++n) {
        x = f.value(n, x);
        if (!std::isfinite(x) || std::abs(x) > opts.overflow_guard) {
            throw overflow_guard(n + 1, x);
        }
        t.values.push_back(x);
    }
    t.bounded = std::all_of(t.values.begin(), t.values.end(),
                            [&](double v) { return std::abs(v) <= opts.bounded_radius; });
    return t;
}

// Trace of the orbit of the point coded by `stream`: the n-th value is the
// midpoint of the cylinder of the next `window` symbols at base index n, which
// contains f_0^n(x) for every x in the infinite-depth cylinder. Widths bound
// the distance to that true orbit point.
[[nodiscard]] inline orbit_trace shadow_orbit(const map_family& f, const set_family& v, const symbol_stream& stream,
                                              std::size_t horizon, std::size_t window, double tau = default_tau)
{
    orbit_trace t;
    t.values.resize(horizon + 1);
    t.widths.resize(horizon + 1);
    auto work = [&](std::size_t from, std::size_t to) {
        for (std::size_t n = from; n < to; ++n) {
            const auto w = witness_point(f, v, stream, window, n, tau);
            t.values[n] = w.point;
            t.widths[n] = w.width();
        }
    };
    const std::size_t total = horizon + 1;
    const std::size_t threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (total < 256 || threads == 1) {
        work(0, total);
    } else {
        std::vector<std::future<void>> jobs;
        const std::size_t chunk = (total + threads - 1) / threads;
        for (std::size_t from = 0; from < total; from += chunk) {
            jobs.push_back(std::async(std::launch::async, work, from, std::min(total, from + chunk)));
        }
        for (auto& j : jobs) {
            j.get();
        }
    }
    t.initial = t.values.front();
    double r = 0.0;
    for (double x : t.values) {
        r = std::max(r, std::abs(x));
    }
    t.radius = r;
    t.bounded = true;
    return t;
}

struct pair_statistics {
    std::vector<double> distance; // |x_n - y_n|
    std::vector<double> slack;    // 2 * max enclosure width at n
    double min_distance = 0.0;
    double max_distance = 0.0;
    std::size_t argmin = 0;
    std::size_t argmax = 0;
};

namespace detail {

inline pair_statistics pair_distances(const orbit_trace& x, const orbit_trace& y)
{
    if (x.values.size() != y.values.size()) {
        throw horizon_mismatch(x.horizon(), y.horizon());
    }
    pair_statistics s;
    const std::size_t n = x.values.size();
    s.distance.resize(n);
    s.slack.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.distance[i] = std::abs(x.values[i] - y.values[i]);
        s.slack[i] = 2.0 * std::max(x.width(i), y.width(i));
    }
    const auto mn = std::min_element(s.distance.begin(), s.distance.end());
    const auto mx = std::max_element(s.distance.begin(), s.distance.end());
    s.argmin = static_cast<std::size_t>(mn - s.distance.begin());
    s.argmax = static_cast<std::size_t>(mx - s.distance.begin());
    s.min_distance = *mn;
    s.max_distance = *mx;
    return s;
}

// chi_{[0,eps)} with the threshold inflated by the enclosure slack.
inline bool is_close(const pair_statistics& s, std::size_t n, double eps)
{
    return s.distance[n] < eps + s.slack[n];
}

} // namespace detail

struct liyorke_options {
    double proximity_tolerance = 1e-6;
    double separation_tolerance = 1e-6;
    double tail_fraction = 0.5; // surrogate window = last fraction of the trace
};

struct liyorke_result {
    pair_statistics stats;
    std::vector<std::size_t> checkpoints;
    std::vector<double> checkpoint_distances;
    double proximal_min = 0.0;       // min over checkpoints
    std::size_t proximal_at = 0;
    double liminf_surrogate = 0.0;   // min over the tail window
    double limsup_surrogate = 0.0;   // max over the tail window
    std::size_t tail_window = 0;
    bool proximal = false;
    bool separated = false;
    [[nodiscard]] bool evidence() const noexcept { return proximal && separated; }
};

// Finite-horizon Li-Yorke surrogates: proximality at the checkpoints (default:
// the tail of the trace) and separation >= delta - tol somewhere on the trace.
[[nodiscard]] inline liyorke_result liyorke_statistics(const orbit_trace& x, const orbit_trace& y, double delta,
                                                       std::optional<std::vector<std::size_t>> checkpoints = {},
                                                       const liyorke_options& opts = {})
{
    liyorke_result r;
    r.stats = detail::pair_distances(x, y);
    const std::size_t len = r.stats.distance.size();
    r.tail_window = std::max<std::size_t>(1, static_cast<std::size_t>(opts.tail_fraction * static_cast<double>(len)));
    const std::size_t tail_from = len - r.tail_window;
    if (checkpoints) {
        for (std::size_t c : *checkpoints) {
            if (c < len) {
                r.checkpoints.push_back(c);
            }
        }
    } else {
        for (std::size_t c = tail_from; c < len; ++c) {
            r.checkpoints.push_back(c);
        }
    }
    r.proximal_min = std::numeric_limits<double>::infinity();
    for (std::size_t c : r.checkpoints) {
        const double d = r.stats.distance[c];
        r.checkpoint_distances.push_back(d);
        r.proximal = r.proximal || d <= opts.proximity_tolerance + r.stats.slack[c];
        if (d < r.proximal_min) {
            r.proximal_min = d;
            r.proximal_at = c;
        }
    }
    r.liminf_surrogate = *std::min_element(r.stats.distance.begin() + static_cast<std::ptrdiff_t>(tail_from),
                                           r.stats.distance.end());
    r.limsup_surrogate = *std::max_element(r.stats.distance.begin() + static_cast<std::ptrdiff_t>(tail_from),
                                           r.stats.distance.end());
    for (std::size_t n = 0; n < len; ++n) {
        if (r.stats.distance[n] >= delta - opts.separation_tolerance - r.stats.slack[n]) {
            r.separated = true;
            break;
        }
    }
    return r;
}

// Geometric grid of `count` values from delta/1000 to delta.
[[nodiscard]] inline std::vector<double> default_epsilon_grid(double delta, std::size_t count = 16)
{
    std::vector<double> grid(count);
    const double lo = delta / 1000.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = lo * std::pow(1000.0, t);
    }
    grid.back() = delta;
    return grid;
}

struct distributional_options {
    double density_tolerance = 0.1;
    double burn_in_fraction = 0.1; // surrogates skip the first fraction of the trace
};

// Closeness checkpoints (k_j with m_j) and separation checkpoints (n supplied
// with the word-repetition length p and word length l).
struct schedule_checkpoints {
    struct closeness {
        std::uint64_t k;
        std::uint64_t m;
    };
    struct separation {
        std::uint64_t n;
        std::uint64_t p;
        std::uint64_t l;
    };
    std::vector<closeness> close;
    std::vector<separation> separate;
};

struct distributional_result {
    std::vector<std::size_t> checkpoints;             // P
    std::vector<double> epsilons;
    std::vector<std::vector<std::uint64_t>> close_counts; // [e][i]: count over the first i+1 checkpoints
    std::vector<std::uint64_t> delta_counts;
    double delta = 0.0;
    std::vector<double> upper_density;                // per epsilon
    double lower_delta_density = 0.0;
    bool evidence = false;

    struct closeness_row {
        std::uint64_t k = 0, m = 0;
        std::vector<std::uint64_t> counts; // per epsilon: #{j < k : d_j < eps}
    };
    struct separation_row {
        std::uint64_t n = 0, p = 0, l = 0;
        std::uint64_t delta_close = 0; // #{j < n : d_j < delta}
        std::uint64_t bound = 0;       // n - (p l - l + 1)
    };
    std::vector<closeness_row> at_closeness;
    std::vector<separation_row> at_separation;

    [[nodiscard]] double density(std::size_t e, std::size_t i) const
    {
        return static_cast<double>(close_counts[e][i]) / static_cast<double>(i + 1);
    }
    [[nodiscard]] double delta_density(std::size_t i) const
    {
        return static_cast<double>(delta_counts[i]) / static_cast<double>(i + 1);
    }
};

// Counting densities (1/n) sum_{i<=n} chi_{[0,eps)}(d_{p_i}) along P for every
// epsilon and for delta. With P = all indices this is the unsequenced form.
[[nodiscard]] inline distributional_result distributional_statistics(
    const orbit_trace& x, const orbit_trace& y, const std::vector<std::size_t>& p,
    const std::vector<double>& epsilons, double delta, const std::optional<schedule_checkpoints>& schedule = {},
    const distributional_options& opts = {})
{
    const auto s = detail::pair_distances(x, y);
    if (p.empty()) {
        throw empty_checkpoint_set();
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] >= s.distance.size() || (i > 0 && p[i] <= p[i - 1])) {
            throw config_error("checkpoints", "checkpoint sequence must be strictly increasing within the horizon");
        }
    }
    distributional_result r;
    r.checkpoints = p;
    r.epsilons = epsilons;
    r.delta = delta;
    r.close_counts.assign(epsilons.size(), std::vector<std::uint64_t>(p.size()));
    r.delta_counts.resize(p.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            c += detail::is_close(s, p[i], epsilons[e]) ? 1 : 0;
            r.close_counts[e][i] = c;
        }
    }
    {
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            c += detail::is_close(s, p[i], delta) ? 1 : 0;
            r.delta_counts[i] = c;
        }
    }
    const auto burn = static_cast<std::size_t>(opts.burn_in_fraction * static_cast<double>(p.size()));
    r.upper_density.assign(epsilons.size(), 0.0);
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        for (std::size_t i = burn; i < p.size(); ++i) {
            r.upper_density[e] = std::max(r.upper_density[e], r.density(e, i));
        }
    }
    r.lower_delta_density = 1.0;
    for (std::size_t i = burn; i < p.size(); ++i) {
        r.lower_delta_density = std::min(r.lower_delta_density, r.delta_density(i));
    }
    r.evidence = r.lower_delta_density <= opts.density_tolerance &&
                 std::all_of(r.upper_density.begin(), r.upper_density.end(),
                             [&](double u) { return u >= 1.0 - opts.density_tolerance; });

    if (schedule) {
        // Counts over all indices j < checkpoint, independent of P.
        for (const auto& c : schedule->close) {
            if (c.k > s.distance.size()) {
                continue;
            }
            distributional_result::closeness_row row{c.k, c.m, {}};
            for (double eps : epsilons) {
                std::uint64_t cnt = 0;
                for (std::size_t j = 0; j < c.k; ++j) {
                    cnt += detail::is_close(s, j, eps) ? 1 : 0;
                }
                row.counts.push_back(cnt);
            }
            r.at_closeness.push_back(std::move(row));
        }
        for (const auto& sp : schedule->separate) {
            if (sp.n > s.distance.size()) {
                continue;
            }
            distributional_result::separation_row row;
            row.n = sp.n;
            row.p = sp.p;
            row.l = sp.l;
            for (std::size_t j = 0; j < sp.n; ++j) {
                row.delta_close += detail::is_close(s, j, delta) ? 1 : 0;
            }
            const std::uint64_t sep = sp.p * sp.l - sp.l + 1;
            row.bound = sp.n >= sep ? sp.n - sep : 0;
            r.at_separation.push_back(row);
        }
    }
    return r;
}

// Increasing checkpoint sequence built from a pair's trace by alternating
// phases: eps-close indices until the eps-density reaches 1 - eta, then
// delta-separated indices until the delta-density drops to eta. Truncated at
// the last completed phase.
struct alternating_sequence {
    std::vector<std::size_t> indices;
    std::size_t completed_phases = 0;
};

[[nodiscard]] inline alternating_sequence alternating_checkpoints(const orbit_trace& x, const orbit_trace& y,
                                                                  double eps, double delta, double eta)
{
    const auto s = detail::pair_distances(x, y);
    const std::size_t len = s.distance.size();
    alternating_sequence out;
    std::vector<std::size_t> seq;
    std::uint64_t eps_close = 0;
    std::uint64_t delta_close = 0;
    bool close_phase = true;
    std::size_t next = 0;
    while (next < len) {
        std::size_t j = next;
        if (close_phase) {
            while (j < len && !detail::is_close(s, j, eps)) {
                ++j;
            }
        } else {
            while (j < len && detail::is_close(s, j, delta)) {
                ++j;
            }
        }
        if (j >= len) {
            break;
        }
        seq.push_back(j);
        eps_close += detail::is_close(s, j, eps) ? 1 : 0;
        delta_close += detail::is_close(s, j, delta) ? 1 : 0;
        next = j + 1;
        const auto n = static_cast<double>(seq.size());
        const bool done = close_phase ? static_cast<double>(eps_close) / n >= 1.0 - eta
                                      : static_cast<double>(delta_close) / n <= eta;
        if (done) {
            close_phase = !close_phase;
            ++out.completed_phases;
            out.indices = seq;
        }
    }
    return out;
}

enum class consistency { consistent, inconsistent, inconclusive };

[[nodiscard]] inline std::string to_string(consistency c)
{
    switch (c) {
    case consistency::consistent: return "consistent";
    case consistency::inconsistent: return "inconsistent";
    case consistency::inconclusive: return "inconclusive";
    }
    return "?";
}

// Li-Yorke evidence and distributional-in-a-sequence evidence should agree
// for each pair. Short traces, and disagreements where the alternating
// construction ran out of indices before two full alternations, are
// reported inconclusive.
[[nodiscard]] inline consistency cross_check_equivalence(const liyorke_result& ly, const distributional_result& dist,
                                                         std::size_t completed_phases,
                                                         std::size_t min_horizon = 100)
{
    if (ly.stats.distance.size() < min_horizon + 1) {
        return consistency::inconclusive;
    }
    if (ly.evidence() == dist.evidence) {
        return consistency::consistent;
    }
    return completed_phases < 3 ? consistency::inconclusive : consistency::inconsistent;
}

} // namespace ndschaos

#pragma once

// One-sided symbol sequences in Sigma_N^+(A), the Sturmian scrambled family,
// and the two block constructions of scrambled-set witnesses with their
// checkpoint schedules.

#include "ndschaos/error.hpp"
#include "ndschaos/transition.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ndschaos {

using rational = boost::multiprecision::cpp_rational;
using index_t = std::uint64_t;

// Immutable, lazily evaluated infinite symbol sequence. Copies share state.
class symbol_stream {
public:
    struct node {
        virtual ~node() = default;
        [[nodiscard]] virtual symbol at(index_t n) const = 0;
    };

    struct segment;

    symbol_stream() = default;
    explicit symbol_stream(std::shared_ptr<const node> impl) : impl_(std::move(impl)) {}

    // (w, w, w, ...)
    static symbol_stream periodic(symbol_word cycle);

    // Finite segments followed by an infinite tail.
    static symbol_stream concat(std::vector<segment> segments, symbol_stream tail);

    [[nodiscard]] symbol at(index_t n) const { return impl_->at(n); }

    [[nodiscard]] symbol_word window(index_t start, index_t length) const
    {
        symbol_word out;
        out.reserve(length);
        for (index_t i = 0; i < length; ++i) {
            out.push_back(at(start + i));
        }
        return out;
    }

    [[nodiscard]] symbol_word prefix(index_t length) const { return window(0, length); }

    [[nodiscard]] symbol_stream shifted(index_t k) const;

    [[nodiscard]] bool valid() const noexcept { return impl_ != nullptr; }

private:
    std::shared_ptr<const node> impl_;
};

struct symbol_stream::segment {
    symbol_stream source; // read from its index 0
    index_t length;
};

namespace detail {

struct periodic_node final : symbol_stream::node {
    explicit periodic_node(symbol_word c) : cycle(std::move(c)) {}
    [[nodiscard]] symbol at(index_t n) const override { return cycle[n % cycle.size()]; }
    symbol_word cycle;
};

struct shift_node final : symbol_stream::node {
    shift_node(symbol_stream b, index_t k) : base(std::move(b)), offset(k) {}
    [[nodiscard]] symbol at(index_t n) const override { return base.at(n + offset); }
    symbol_stream base;
    index_t offset;
};

struct concat_node final : symbol_stream::node {
    concat_node(std::vector<symbol_stream::segment> s, symbol_stream t) : segs(std::move(s)), tail(std::move(t))
    {
        index_t acc = 0;
        for (const auto& seg : segs) {
            starts.push_back(acc);
            acc += seg.length;
        }
        total = acc;
    }
    [[nodiscard]] symbol at(index_t n) const override
    {
        if (n >= total) {
            return tail.at(n - total);
        }
        const auto it = std::upper_bound(starts.begin(), starts.end(), n);
        const auto k = static_cast<std::size_t>(it - starts.begin()) - 1;
        return segs[k].source.at(n - starts[k]);
    }
    std::vector<symbol_stream::segment> segs;
    std::vector<index_t> starts;
    index_t total = 0;
    symbol_stream tail;
};

} // namespace detail

inline symbol_stream symbol_stream::periodic(symbol_word cycle)
{
    if (cycle.empty()) {
        throw config_error("stream", "periodic cycle is empty");
    }
    return symbol_stream(std::make_shared<detail::periodic_node>(std::move(cycle)));
}

inline symbol_stream symbol_stream::concat(std::vector<segment> segments, symbol_stream tail)
{
    return symbol_stream(std::make_shared<detail::concat_node>(std::move(segments), std::move(tail)));
}

inline symbol_stream symbol_stream::shifted(index_t k) const
{
    if (k == 0) {
        return *this;
    }
    return symbol_stream(std::make_shared<detail::shift_node>(*this, k));
}

[[nodiscard]] inline symbol_stream word_stream(const symbol_word& w, symbol_stream tail)
{
    return symbol_stream::concat({{symbol_stream::periodic(w), w.size()}}, std::move(tail));
}

// sum_{i<T} d'(a_i, b_i) / 2^i; within 2^{1-T} of the full metric.
[[nodiscard]] inline rational rho_distance(const symbol_stream& a, const symbol_stream& b, std::size_t truncation)
{
    rational total = 0;
    big_int denom = 1;
    for (std::size_t i = 0; i < truncation; ++i) {
        if (a.at(i) != b.at(i)) {
            total += rational(1, denom);
        }
        denom <<= 1;
    }
    return total;
}

[[nodiscard]] inline symbol_stream shift(const symbol_stream& a, index_t k) { return a.shifted(k); }

// Sturmian first differences b_i = floor((i+2) t) - floor((i+1) t), i >= 0.
// Distinct irrational t, t' give bit streams that agree and disagree
// infinitely often.
[[nodiscard]] inline std::vector<int> scrambled_family_element(double t, std::size_t length)
{
    if (!(t > 0.0 && t < 1.0)) {
        throw parameter_out_of_range("scrambled-family parameter must lie in (0, 1)");
    }
    std::vector<int> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        const auto hi = std::floor(static_cast<double>(i + 2) * t);
        const auto lo = std::floor(static_cast<double>(i + 1) * t);
        bits[i] = static_cast<int>(hi - lo);
    }
    return bits;
}

namespace detail {

inline index_t checked_mul(index_t a, index_t b)
{
    index_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw schedule_inconsistent("schedule length overflows 64-bit indices; reduce the number of levels");
    }
    return r;
}

inline index_t checked_add(index_t a, index_t b)
{
    index_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw schedule_inconsistent("schedule length overflows 64-bit indices; reduce the number of levels");
    }
    return r;
}

inline symbol first_predecessor(const transition_matrix& a, symbol s)
{
    for (symbol t = 1; t <= static_cast<symbol>(a.size()); ++t) {
        if (a.allows(t, s)) {
            return t;
        }
    }
    throw hypotheses_not_met("symbol without predecessor");
}

inline symbol first_successor(const transition_matrix& a, symbol s)
{
    for (symbol t = 1; t <= static_cast<symbol>(a.size()); ++t) {
        if (a.allows(s, t)) {
            return t;
        }
    }
    throw hypotheses_not_met("symbol without successor");
}

inline symbol_word required_word(const transition_matrix& a, symbol from, symbol to)
{
    auto w = shortest_word(a, from, to);
    if (!w) {
        throw hypotheses_not_met("no allowable word from " + std::to_string(from) + " to " + std::to_string(to));
    }
    return *w;
}

inline void require_lemma_hypotheses(const transition_matrix& a)
{
    if (!has_lemma_hypotheses(a)) {
        throw hypotheses_not_met("matrix must be irreducible with a row sum >= 2");
    }
}

} // namespace detail

// Schedule of the Li-Yorke witness sequence
//   (b_0..b_{m_1-1}, w3, w0, B_1, b_0..b_{m_2-1}, w3, w0, B_1, B_2, ...).
struct gamma_schedule {
    symbol t0 = 0, r0 = 0;
    symbol_word omega0, omega1, omega2, omega3;
    std::size_t l1 = 0, l2 = 0, l3 = 0;
    std::vector<index_t> m;          // m_k, k = 1..K at [k-1]
    std::vector<index_t> n;          // (k-1)l1 + k(k-1)/2 l2 + (k-1)l3 + sum_{t<=k} m_t
    std::vector<index_t> proximal;   // n_k - m_k: start of the k-th beta block
    std::vector<index_t> block_start; // measured
    std::vector<index_t> omega3_offset; // measured
    index_t total_length = 0;         // length of the block part; the tail is beta
};

struct gamma_construction {
    symbol_stream stream;
    gamma_schedule schedule;
};

// Closed form for the offset of the k-th omega_3 block.
[[nodiscard]] inline index_t gamma_checkpoint_formula(std::size_t k, std::size_t l1, std::size_t l2,
                                                      std::size_t l3, const std::vector<index_t>& m)
{
    index_t sum_m = 0;
    for (std::size_t t = 0; t < k; ++t) {
        sum_m += m[t];
    }
    const index_t km1 = k - 1;
    return km1 * l1 + (static_cast<index_t>(k) * km1 / 2) * l2 + km1 * l3 + sum_m;
}

// selector[i] chooses B_{i+1}: 0 -> omega_1, 1 -> omega_2.
[[nodiscard]] inline gamma_construction build_gamma_hat(const transition_matrix& a, const symbol_stream& beta,
                                                        symbol s0, const std::vector<index_t>& m,
                                                        const std::vector<int>& selector, std::size_t depth)
{
    detail::require_lemma_hypotheses(a);
    if (depth == 0 || m.size() < depth) {
        throw config_error("construct", "need at least " + std::to_string(depth) + " block bounds m_k");
    }
    if (selector.size() < depth) {
        throw selector_exhausted(selector.size(), depth);
    }
    for (std::size_t k = 0; k < depth; ++k) {
        if (m[k] < 1 || (k > 0 && m[k] <= m[k - 1])) {
            throw not_increasing("block bounds m_k must be positive and strictly increasing");
        }
        if (beta.at(m[k]) != s0) {
            throw hypotheses_not_met("beta has symbol " + std::to_string(beta.at(m[k])) + " at m_" +
                                     std::to_string(k + 1) + " = " + std::to_string(m[k]) + ", expected s0 = " +
                                     std::to_string(s0));
        }
    }
    if (auto bad = first_forbidden(a, beta.prefix(m[depth - 1] + 1))) {
        throw not_allowable(*bad);
    }

    gamma_schedule sch;
    const symbol b0 = beta.at(0);
    sch.t0 = detail::first_predecessor(a, b0);
    sch.r0 = detail::first_successor(a, b0);
    sch.omega0 = detail::required_word(a, sch.r0, sch.t0);
    std::tie(sch.omega1, sch.omega2) = distinct_word_pair(a, b0, sch.t0);
    sch.omega3 = s0 == b0 ? symbol_word{b0} : detail::required_word(a, s0, b0);
    sch.l1 = sch.omega0.size();
    sch.l2 = sch.omega1.size();
    sch.l3 = sch.omega3.size();
    sch.m.assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(depth));

    const auto s_w0 = symbol_stream::periodic(sch.omega0);
    const auto s_w1 = symbol_stream::periodic(sch.omega1);
    const auto s_w2 = symbol_stream::periodic(sch.omega2);
    const auto s_w3 = symbol_stream::periodic(sch.omega3);

    std::vector<symbol_stream::segment> segs;
    index_t pos = 0;
    for (std::size_t k = 1; k <= depth; ++k) {
        sch.block_start.push_back(pos);
        segs.push_back({beta, sch.m[k - 1]});
        pos += sch.m[k - 1];
        sch.omega3_offset.push_back(pos);
        segs.push_back({s_w3, sch.l3});
        pos += sch.l3;
        segs.push_back({s_w0, sch.l1});
        pos += sch.l1;
        for (std::size_t i = 0; i < k; ++i) {
            segs.push_back({selector[i] == 0 ? s_w1 : s_w2, sch.l2});
            pos += sch.l2;
        }
    }
    sch.total_length = pos;

    for (std::size_t k = 1; k <= depth; ++k) {
        const index_t nk = gamma_checkpoint_formula(k, sch.l1, sch.l2, sch.l3, sch.m);
        sch.n.push_back(nk);
        sch.proximal.push_back(nk - sch.m[k - 1]);
        if (nk != sch.omega3_offset[k - 1] || sch.proximal.back() != sch.block_start[k - 1]) {
            throw schedule_inconsistent("checkpoint formula disagrees with assembled block offsets at k = " +
                                        std::to_string(k));
        }
    }
    return {symbol_stream::concat(std::move(segs), beta), std::move(sch)};
}

// One level j of the distributional witness sequence.
struct beta_level {
    int bit = 0;             // selector bit b_{j-1}
    index_t start = 0;       // offset of the level
    index_t m = 0;           // m_j (levels >= 2); 0 for level 1
    index_t k = 0;           // k_j = offset after r_{m_j - 1} (levels >= 2)
    index_t return_length = 0; // |R_j| (levels >= 2)
    index_t omega0_end = 0;  // offset just after the level's omega_0
    index_t p = 0;           // repetitions p_j of the selected word
    index_t end = 0;         // offset just after omega_b^{p_j}
};

struct beta_schedule {
    symbol r0 = 0, l0 = 0, m0 = 0;
    symbol_word cycle; // period of gamma
    symbol_word omega0, omega1, omega2;
    std::size_t l = 0; // |omega_1| = |omega_2|
    std::vector<beta_level> levels;
    std::vector<int> bits;
};

struct beta_construction {
    symbol_stream stream;
    beta_schedule schedule;
};

// Checks n_j = p_j l + p_j 2^{-j} and k_j = m_j + m_j 2^{-j} exactly.
inline void verify_beta_schedule(const beta_schedule& s)
{
    for (std::size_t j = 1; j <= s.levels.size(); ++j) {
        const auto& lv = s.levels[j - 1];
        const index_t two_j = index_t{1} << j;
        if (lv.p % two_j != 0 || lv.end != lv.p * s.l + lv.p / two_j) {
            throw schedule_inconsistent("identity n = p l + p 2^-j fails at level " + std::to_string(j));
        }
        if (j >= 2 && (lv.m % two_j != 0 || lv.k != lv.m + lv.m / two_j)) {
            throw schedule_inconsistent("identity k = m + m 2^-j fails at level " + std::to_string(j));
        }
    }
}

// selector bit 0 picks omega_1, bit 1 picks omega_2.
[[nodiscard]] inline beta_construction build_beta_hat(const transition_matrix& a, double selector_t,
                                                      const symbol_word& cycle, std::size_t depth_levels)
{
    detail::require_lemma_hypotheses(a);
    if (depth_levels == 0) {
        throw config_error("construct", "levels must be >= 1");
    }
    if (cycle.empty() || first_forbidden(a, cycle) || !a.allows(cycle.back(), cycle.front())) {
        throw not_allowable(first_forbidden(a, cycle).value_or(cycle.empty() ? 0 : cycle.size() - 1));
    }
    const auto gamma = symbol_stream::periodic(cycle);

    beta_schedule s;
    s.cycle = cycle;
    s.r0 = cycle.front();
    s.l0 = detail::first_predecessor(a, s.r0);
    s.m0 = detail::first_successor(a, s.r0);
    s.omega0 = detail::required_word(a, s.m0, s.l0);
    std::tie(s.omega1, s.omega2) = distinct_word_pair(a, s.r0, s.l0);
    s.l = s.omega1.size();
    s.bits = scrambled_family_element(selector_t, depth_levels);

    const auto s_w0 = symbol_stream::periodic(s.omega0);
    const auto s_w1 = symbol_stream::periodic(s.omega1);
    const auto s_w2 = symbol_stream::periodic(s.omega2);
    const auto s_r0 = symbol_stream::periodic({s.r0});

    std::vector<symbol_stream::segment> segs;
    index_t pos = 0;
    for (std::size_t j = 1; j <= depth_levels; ++j) {
        beta_level lv;
        lv.bit = s.bits[j - 1];
        lv.start = pos;
        const index_t two_j = index_t{1} << j;
        if (j == 1) {
            segs.push_back({s_r0, 1});
            pos += 1;
        } else {
            lv.m = detail::checked_mul(two_j, pos);
            segs.push_back({gamma, lv.m});
            pos = detail::checked_add(pos, lv.m);
            lv.k = pos;
            const symbol last = gamma.at(lv.m - 1);
            const symbol_word ret = last == s.r0 ? symbol_word{s.r0} : detail::required_word(a, last, s.r0);
            lv.return_length = ret.size();
            if (ret.size() > 1) {
                const symbol_word rest(ret.begin() + 1, ret.end());
                segs.push_back({symbol_stream::periodic(rest), rest.size()});
                pos += rest.size();
            }
        }
        segs.push_back({s_w0, s.omega0.size()});
        pos += s.omega0.size();
        lv.omega0_end = pos;
        lv.p = detail::checked_mul(two_j, pos);
        const index_t block = detail::checked_mul(lv.p, s.l);
        segs.push_back({lv.bit == 0 ? s_w1 : s_w2, block});
        pos = detail::checked_add(pos, block);
        lv.end = pos;
        s.levels.push_back(lv);
    }
    verify_beta_schedule(s);
    return {symbol_stream::concat(std::move(segs), gamma), std::move(s)};
}

} // namespace ndschaos

#pragma once

// Transition matrices over symbols 1..N, allowable words, and the word-search
// routines behind the connecting words used by the scrambled-set builders.

#include "ndschaos/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace ndschaos {

using symbol = int;                     // 1-based
using symbol_word = std::vector<symbol>; // nonempty in every public API
using big_int = boost::multiprecision::cpp_int;

class transition_matrix {
public:
    // Throws invalid_transition_matrix naming the first violated axiom.
    explicit transition_matrix(const std::vector<std::vector<int>>& entries)
    {
        const std::size_t n = entries.size();
        if (n < 2) {
            throw invalid_transition_matrix(invalid_transition_matrix::reason::size_too_small, 0, 0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (entries[i].size() != n) {
                throw invalid_transition_matrix(invalid_transition_matrix::reason::size_too_small, i + 1, 0);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (entries[i][j] != 0 && entries[i][j] != 1) {
                    throw invalid_transition_matrix(invalid_transition_matrix::reason::non_binary_entry, i + 1,
                                                    j + 1);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (std::all_of(entries[i].begin(), entries[i].end(), [](int v) { return v == 0; })) {
                throw invalid_transition_matrix(invalid_transition_matrix::reason::zero_row, i + 1, 0);
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                any = any || entries[i][j] == 1;
            }
            if (!any) {
                throw invalid_transition_matrix(invalid_transition_matrix::reason::zero_column, 0, j + 1);
            }
        }
        n_ = n;
        bits_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                bits_[i * n + j] = static_cast<unsigned char>(entries[i][j]);
            }
        }
        irreducible_ = strongly_connected();
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    // a_{ij} for 1-based symbols.
    [[nodiscard]] bool allows(symbol i, symbol j) const noexcept
    {
        return bits_[static_cast<std::size_t>(i - 1) * n_ + static_cast<std::size_t>(j - 1)] != 0;
    }

    [[nodiscard]] bool irreducible() const noexcept { return irreducible_; }

    [[nodiscard]] std::size_t row_sum(symbol i) const noexcept
    {
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j) {
            s += allows(i, static_cast<symbol>(j)) ? 1 : 0;
        }
        return s;
    }

    [[nodiscard]] std::vector<std::vector<int>> entries() const
    {
        std::vector<std::vector<int>> out(n_, std::vector<int>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                out[i][j] = bits_[i * n_ + j];
            }
        }
        return out;
    }

    // Fresh strong-connectivity computation (forward and reverse BFS from symbol 1).
    [[nodiscard]] bool strongly_connected() const
    {
        auto reaches_all = [this](bool reverse) {
            std::vector<bool> seen(n_, false);
            std::queue<std::size_t> q;
            q.push(0);
            seen[0] = true;
            while (!q.empty()) {
                const std::size_t u = q.front();
                q.pop();
                for (std::size_t v = 0; v < n_; ++v) {
                    const bool edge = reverse ? bits_[v * n_ + u] != 0 : bits_[u * n_ + v] != 0;
                    if (edge && !seen[v]) {
                        seen[v] = true;
                        q.push(v);
                    }
                }
            }
            return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
        };
        return reaches_all(false) && reaches_all(true);
    }

    bool operator==(const transition_matrix& o) const { return n_ == o.n_ && bits_ == o.bits_; }

private:
    std::size_t n_ = 0;
    std::vector<unsigned char> bits_;
    bool irreducible_ = false;
};

[[nodiscard]] inline transition_matrix validate_transition_matrix(const std::vector<std::vector<int>>& entries)
{
    return transition_matrix(entries);
}

[[nodiscard]] inline bool is_irreducible(const transition_matrix& a) { return a.irreducible(); }

// Smallest symbol whose row has at least two allowed successors.
[[nodiscard]] inline std::optional<symbol> branching_row(const transition_matrix& a)
{
    for (std::size_t i = 1; i <= a.size(); ++i) {
        if (a.row_sum(static_cast<symbol>(i)) >= 2) {
            return static_cast<symbol>(i);
        }
    }
    return std::nullopt;
}

// Position p such that (w[p], w[p+1]) is forbidden, if any. Symbols outside
// 1..N are reported at their own position.
[[nodiscard]] inline std::optional<std::size_t> first_forbidden(const transition_matrix& a,
                                                                std::span<const symbol> w)
{
    const auto n = static_cast<symbol>(a.size());
    for (std::size_t p = 0; p < w.size(); ++p) {
        if (w[p] < 1 || w[p] > n) {
            return p;
        }
        if (p + 1 < w.size() && w[p + 1] >= 1 && w[p + 1] <= n && !a.allows(w[p], w[p + 1])) {
            return p;
        }
    }
    return std::nullopt;
}

[[nodiscard]] inline bool is_allowable(const transition_matrix& a, std::span<const symbol> w)
{
    return !w.empty() && !first_forbidden(a, w).has_value();
}

[[nodiscard]] inline bool has_lemma_hypotheses(const transition_matrix& a)
{
    return a.irreducible() && branching_row(a).has_value();
}

// Exact A^k.
[[nodiscard]] inline std::vector<std::vector<big_int>> matrix_power(const transition_matrix& a, std::size_t k)
{
    const std::size_t n = a.size();
    std::vector<std::vector<big_int>> result(n, std::vector<big_int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        result[i][i] = 1;
    }
    std::vector<std::vector<big_int>> base(n, std::vector<big_int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            base[i][j] = a.allows(static_cast<symbol>(i + 1), static_cast<symbol>(j + 1)) ? 1 : 0;
        }
    }
    auto mul = [n](const auto& x, const auto& y) {
        std::vector<std::vector<big_int>> z(n, std::vector<big_int>(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < n; ++l) {
                if (x[i][l] == 0) {
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    z[i][j] += x[i][l] * y[l][j];
                }
            }
        }
        return z;
    };
    while (k > 0) {
        if (k & 1U) {
            result = mul(result, base);
        }
        base = mul(base, base);
        k >>= 1U;
    }
    return result;
}

// Number of allowable words of the given length from i to j, i.e. (A^{length-1})_{ij}.
[[nodiscard]] inline big_int count_words(const transition_matrix& a, symbol i, symbol j, std::size_t length)
{
    if (length == 0) {
        return 0;
    }
    return matrix_power(a, length - 1)[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
}

namespace detail {

// reach[k][s] is true when symbol s+1 reaches `target` in exactly k steps.
inline std::vector<std::vector<bool>> exact_reach(const transition_matrix& a, symbol target, std::size_t steps)
{
    const std::size_t n = a.size();
    std::vector<std::vector<bool>> reach(steps + 1, std::vector<bool>(n, false));
    reach[0][static_cast<std::size_t>(target - 1)] = true;
    for (std::size_t k = 1; k <= steps; ++k) {
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t t = 0; t < n; ++t) {
                if (reach[k - 1][t] && a.allows(static_cast<symbol>(s + 1), static_cast<symbol>(t + 1))) {
                    reach[k][s] = true;
                    break;
                }
            }
        }
    }
    return reach;
}

// Completes `prefix` greedily to the lexicographically least word of total
// length `length` ending at `target`; the caller guarantees feasibility.
inline symbol_word complete_least(const transition_matrix& a, symbol_word prefix, std::size_t length,
                                  const std::vector<std::vector<bool>>& reach)
{
    const auto n = static_cast<symbol>(a.size());
    while (prefix.size() < length) {
        const std::size_t remaining = length - prefix.size() - 1;
        const symbol cur = prefix.back();
        for (symbol t = 1; t <= n; ++t) {
            if (a.allows(cur, t) && reach[remaining][static_cast<std::size_t>(t - 1)]) {
                prefix.push_back(t);
                break;
            }
        }
    }
    return prefix;
}

// Lexicographically least allowable word (i, ..., j) of exactly `length` symbols.
inline std::optional<symbol_word> least_word(const transition_matrix& a, symbol i, symbol j, std::size_t length)
{
    if (length == 0) {
        return std::nullopt;
    }
    const auto reach = exact_reach(a, j, length - 1);
    if (!reach[length - 1][static_cast<std::size_t>(i - 1)]) {
        return std::nullopt;
    }
    return complete_least(a, symbol_word{i}, length, reach);
}

// Lexicographic successor of w among allowable words with the same length and endpoints.
inline std::optional<symbol_word> next_word(const transition_matrix& a, const symbol_word& w)
{
    const std::size_t len = w.size();
    if (len < 3) {
        return std::nullopt;
    }
    const auto reach = exact_reach(a, w.back(), len - 1);
    const auto n = static_cast<symbol>(a.size());
    for (std::size_t p = len - 2; p >= 1; --p) {
        const std::size_t remaining = len - 1 - p;
        for (symbol t = w[p] + 1; t <= n; ++t) {
            if (a.allows(w[p - 1], t) && reach[remaining][static_cast<std::size_t>(t - 1)]) {
                symbol_word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
                head.push_back(t);
                return complete_least(a, std::move(head), len, reach);
            }
        }
    }
    return std::nullopt;
}

// Upper bound on lengths that must be scanned before a word (i,...,j) of
// length > min_len appears, for an irreducible matrix.
inline std::size_t search_cap(const transition_matrix& a, std::size_t min_len)
{
    const std::size_t n = a.size();
    return min_len + 2 * n * n + n + 2;
}

} // namespace detail

// Shortest allowable word (i, ..., j) of length > min_len, lexicographically
// least among the shortest. Only irreducibility is required.
[[nodiscard]] inline std::optional<symbol_word> shortest_word(const transition_matrix& a, symbol i, symbol j,
                                                              std::size_t min_len = 0)
{
    const std::size_t cap = detail::search_cap(a, min_len);
    const auto reach = detail::exact_reach(a, j, cap);
    for (std::size_t len = min_len + 1; len <= cap + 1; ++len) {
        if (reach[len - 1][static_cast<std::size_t>(i - 1)]) {
            return detail::complete_least(a, symbol_word{i}, len, reach);
        }
    }
    return std::nullopt;
}

// Allowable word (i, ..., j) with |w| > min_len. Requires an irreducible
// matrix with a branching row.
[[nodiscard]] inline symbol_word find_allowable_word(const transition_matrix& a, symbol i, symbol j,
                                                     std::size_t min_len)
{
    if (!has_lemma_hypotheses(a)) {
        throw hypotheses_not_met("matrix must be irreducible with a row sum >= 2");
    }
    auto w = shortest_word(a, i, j, min_len);
    if (!w) {
        throw hypotheses_not_met("no allowable word found within the search bound");
    }
    return *w;
}

// Lexicographically least allowable word different from w with the same
// length and end symbols, if one exists.
[[nodiscard]] inline std::optional<symbol_word> alternative_word(const transition_matrix& a, const symbol_word& w)
{
    if (auto bad = first_forbidden(a, w); bad || w.empty()) {
        throw not_allowable(bad.value_or(0));
    }
    auto first = detail::least_word(a, w.front(), w.back(), w.size());
    if (first && *first != w) {
        return first;
    }
    return detail::next_word(a, w);
}

// Shortest length admitting two distinct allowable words (i, ..., j), and the
// two lexicographically least such words.
[[nodiscard]] inline std::pair<symbol_word, symbol_word> distinct_word_pair(const transition_matrix& a, symbol i,
                                                                            symbol j)
{
    if (!has_lemma_hypotheses(a)) {
        throw hypotheses_not_met("matrix must be irreducible with a row sum >= 2");
    }
    const std::size_t n = a.size();
    const std::size_t cap = 2 * n * (n * n - 2 * n + 2) + 1;
    for (std::size_t len = 1; len <= cap; ++len) {
        if (count_words(a, i, j, len) >= 2) {
            auto w1 = *detail::least_word(a, i, j, len);
            auto w2 = *alternative_word(a, w1);
            return {std::move(w1), std::move(w2)};
        }
    }
    throw hypotheses_not_met("no pair of distinct equal-length words found");
}

} // namespace ndschaos

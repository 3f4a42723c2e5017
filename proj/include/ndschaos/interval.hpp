#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ndschaos {

// Closed interval [lower, upper] of the real line.
struct interval {
    double lower = 0.0;
    double upper = 0.0;

    [[nodiscard]] constexpr double width() const noexcept { return upper - lower; }
    [[nodiscard]] constexpr double midpoint() const noexcept { return lower + 0.5 * (upper - lower); }
    [[nodiscard]] constexpr bool contains(double x) const noexcept { return lower <= x && x <= upper; }
    [[nodiscard]] constexpr bool contains(const interval& o) const noexcept
    {
        return lower <= o.lower && o.upper <= upper;
    }

    constexpr bool operator==(const interval&) const = default;
};

[[nodiscard]] inline std::optional<interval> intersect(const interval& a, const interval& b) noexcept
{
    const double lo = std::max(a.lower, b.lower);
    const double hi = std::min(a.upper, b.upper);
    if (lo > hi) {
        return std::nullopt;
    }
    return interval{lo, hi};
}

[[nodiscard]] inline double gap(const interval& a, const interval& b) noexcept
{
    if (a.upper < b.lower) {
        return b.lower - a.upper;
    }
    if (b.upper < a.lower) {
        return a.lower - b.upper;
    }
    return 0.0;
}

// Finite union of closed intervals, kept sorted with overlapping or touching
// components merged.
class interval_union {
public:
    interval_union() = default;
    interval_union(std::initializer_list<interval> parts) : parts_(parts) { normalize(); }
    explicit interval_union(std::vector<interval> parts) : parts_(std::move(parts)) { normalize(); }
    explicit interval_union(const interval& single) : parts_{single} { normalize(); }

    [[nodiscard]] bool empty() const noexcept { return parts_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return parts_.size(); }
    [[nodiscard]] std::span<const interval> components() const noexcept { return parts_; }
    [[nodiscard]] const interval& operator[](std::size_t i) const { return parts_[i]; }
    [[nodiscard]] auto begin() const noexcept { return parts_.begin(); }
    [[nodiscard]] auto end() const noexcept { return parts_.end(); }

    [[nodiscard]] double lower() const { return parts_.front().lower; }
    [[nodiscard]] double upper() const { return parts_.back().upper; }
    [[nodiscard]] interval hull() const { return {lower(), upper()}; }

    // sup |x - y| over the set; zero for the empty set.
    [[nodiscard]] double diameter() const noexcept { return empty() ? 0.0 : upper() - lower(); }

    [[nodiscard]] bool contains(double x) const noexcept
    {
        return std::any_of(parts_.begin(), parts_.end(), [x](const interval& p) { return p.contains(x); });
    }

    // True when every component of `o` lies inside a single component of *this.
    [[nodiscard]] bool contains(const interval_union& o) const noexcept { return covering_slack(o) >= 0.0; }

    // Smallest, over components c of `o`, of the best margin by which a single
    // component of *this covers c. Negative when some component is not covered;
    // +inf when `o` is empty.
    [[nodiscard]] double covering_slack(const interval_union& o) const noexcept
    {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& c : o.parts_) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& p : parts_) {
                best = std::max(best, std::min(c.lower - p.lower, p.upper - c.upper));
            }
            worst = std::min(worst, best);
        }
        return worst;
    }

    [[nodiscard]] interval_union intersect(const interval_union& o) const
    {
        std::vector<interval> out;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < parts_.size() && j < o.parts_.size()) {
            if (auto x = ndschaos::intersect(parts_[i], o.parts_[j])) {
                out.push_back(*x);
            }
            if (parts_[i].upper < o.parts_[j].upper) {
                ++i;
            } else {
                ++j;
            }
        }
        interval_union r;
        r.parts_ = std::move(out);
        return r;
    }

    [[nodiscard]] interval_union unite(const interval_union& o) const
    {
        std::vector<interval> all(parts_);
        all.insert(all.end(), o.parts_.begin(), o.parts_.end());
        return interval_union(std::move(all));
    }

    // Lebesgue measure of the intersection of the two sets.
    [[nodiscard]] double overlap_measure(const interval_union& o) const
    {
        double m = 0.0;
        for (const auto& p : intersect(o)) {
            m += p.width();
        }
        return m;
    }

    bool operator==(const interval_union&) const = default;

private:
    void normalize()
    {
        for (const auto& p : parts_) {
            assert(!(p.lower > p.upper) && "interval with lower > upper");
            (void)p;
        }
        std::sort(parts_.begin(), parts_.end(),
                  [](const interval& a, const interval& b) { return a.lower < b.lower; });
        std::vector<interval> merged;
        for (const auto& p : parts_) {
            if (!merged.empty() && p.lower <= merged.back().upper) {
                merged.back().upper = std::max(merged.back().upper, p.upper);
            } else {
                merged.push_back(p);
            }
        }
        parts_ = std::move(merged);
    }

    std::vector<interval> parts_;
};

// d(A, B) = inf |a - b|; zero when the sets meet.
[[nodiscard]] inline double distance(const interval_union& a, const interval_union& b)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a) {
        for (const auto& q : b) {
            best = std::min(best, gap(p, q));
        }
    }
    return best;
}

} // namespace ndschaos

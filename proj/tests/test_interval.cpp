#include "ndschaos/interval.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ndschaos;

TEST(IntervalUnion, MergesOverlappingAndTouchingComponents)
{
    const interval_union u{{0.5, 0.7}, {0.0, 0.2}, {0.2, 0.3}, {0.6, 0.9}};
    ASSERT_EQ(u.size(), 2U);
    EXPECT_DOUBLE_EQ(u[0].lower, 0.0);
    EXPECT_DOUBLE_EQ(u[0].upper, 0.3);
    EXPECT_DOUBLE_EQ(u[1].lower, 0.5);
    EXPECT_DOUBLE_EQ(u[1].upper, 0.9);
}

TEST(IntervalUnion, DiameterSpansAllComponents)
{
    const interval_union u{{0.0, 0.1}, {0.8, 1.0}};
    EXPECT_DOUBLE_EQ(u.diameter(), 1.0);
    EXPECT_DOUBLE_EQ(interval_union().diameter(), 0.0);
}

TEST(IntervalUnion, DistanceIsSmallestGap)
{
    const interval_union a{{0.0, 1.0 / 3.0}};
    const interval_union b{{0.6, 1.0}};
    EXPECT_NEAR(distance(a, b), 4.0 / 15.0, 1e-15);
    EXPECT_EQ((distance(interval_union{{0.0, 1.0}}, interval_union{{1.0, 2.0}})), 0.0);
}

TEST(IntervalUnion, CoveringSlackMeasuresWorstComponent)
{
    const interval_union big{{0.0, 1.0}};
    EXPECT_NEAR(big.covering_slack(interval_union{{0.2, 0.9}}), 0.1, 1e-15);
    EXPECT_LT(big.covering_slack(interval_union{{0.5, 1.2}}), 0.0);
    EXPECT_TRUE(big.contains(interval_union{{0.0, 1.0}}));
}

TEST(IntervalUnion, IntersectionAndOverlap)
{
    const interval_union a{{0.0, 0.5}, {0.7, 1.0}};
    const interval_union b{{0.4, 0.8}};
    const auto c = a.intersect(b);
    ASSERT_EQ(c.size(), 2U);
    EXPECT_NEAR(a.overlap_measure(b), 0.2, 1e-15);
    EXPECT_EQ((interval_union{{0.0, 1.0}}.overlap_measure(interval_union{{1.0, 2.0}})), 0.0);
}

TEST(IntervalUnion, RandomUnionsStaySortedAndDisjoint)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<interval> parts;
        for (int k = 0; k < 6; ++k) {
            const double a = u(rng);
            const double b = u(rng);
            parts.push_back({std::min(a, b), std::max(a, b)});
        }
        const interval_union v(parts);
        for (std::size_t i = 1; i < v.size(); ++i) {
            EXPECT_LT(v[i - 1].upper, v[i].lower);
        }
        for (const auto& p : parts) {
            EXPECT_TRUE(v.contains(p.midpoint()));
        }
    }
}

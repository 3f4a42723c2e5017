#include "ndschaos/verifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ndschaos;

namespace {

const transition_matrix full2{{{1, 1}, {1, 1}}};

set_family example_sets() { return set_family({interval_union{{0.0, 1.0 / 3.0}}, interval_union{{0.6, 1.0}}}); }

map_family logistic_const(double r) { return {family_kind::logistic, parameter_sequence::constant(r)}; }

map_family logistic_uniform(std::size_t count = 2000)
{
    return {family_kind::logistic, parameter_sequence::uniform(4.5, 5.0, 20240517, count)};
}

symbol_word random_word(std::mt19937_64& rng, std::size_t len)
{
    std::uniform_int_distribution<int> s(1, 2);
    symbol_word w(len);
    for (auto& x : w) {
        x = s(rng);
    }
    return w;
}

} // namespace

TEST(CoupledExpansion, ExampleSystemPasses)
{
    const auto v = check_coupled_expansion(logistic_uniform(), example_sets(), full2, 1000, true);
    EXPECT_TRUE(v.passed);
    EXPECT_GE(v.margins.at("min_inclusion_slack"), 0.0);
    EXPECT_NEAR(v.margins.at("min_separation"), 4.0 / 15.0, 1e-15);
    EXPECT_EQ(v.per_index.size(), 1000U);
}

TEST(CoupledExpansion, ConstantThreeFails)
{
    const auto v = check_coupled_expansion(logistic_const(3.0), example_sets(), full2, 10, false);
    EXPECT_FALSE(v.passed);
    // f(V1) = [0, 2/3] misses (2/3, 1]
    EXPECT_NEAR(v.margins.at("min_inclusion_slack"), 2.0 / 3.0 - 1.0, 1e-12);
}

TEST(CoupledExpansion, OverlapThrows)
{
    const set_family v({interval_union{{0.0, 0.5}}, interval_union{{0.4, 1.0}}});
    try {
        (void)check_coupled_expansion(logistic_const(4.5), v, full2, 5, false);
        FAIL();
    } catch (const separation_violated& e) {
        EXPECT_EQ(e.first(), 1U);
        EXPECT_EQ(e.second(), 2U);
        EXPECT_EQ(e.index(), 0U);
    }
}

TEST(CoupledExpansion, TouchingSetsNeedNonStrictMode)
{
    const set_family v({interval_union{{0.0, 0.5}}, interval_union{{0.5, 1.0}}});
    const map_family tent(family_kind::tent, parameter_sequence::constant(2.0));
    EXPECT_TRUE(check_coupled_expansion(tent, v, full2, 20, false).passed);
    EXPECT_FALSE(check_coupled_expansion(tent, v, full2, 20, true).passed);
}

TEST(DeltaSeparation, Examples)
{
    EXPECT_NEAR(delta_separation(example_sets()), 4.0 / 15.0, 1e-15);
    EXPECT_EQ(delta_separation(set_family({interval_union{{0.0, 1.0}}, interval_union{{1.0, 2.0}}})), 0.0);
    const set_family three({interval_union{{0.0, 0.1}}, interval_union{{0.5, 0.6}}, interval_union{{0.65, 1.0}}});
    EXPECT_NEAR(delta_separation(three), 0.05, 1e-15);
}

TEST(Expansion, ExampleSystem)
{
    const auto f = logistic_uniform();
    const auto one = check_expansion(f, example_sets(), full2, 1000, symbol{1});
    EXPECT_TRUE(one.passed);
    EXPECT_NEAR(one.margins.at("lambda"), 1.5, 1e-12);
    const auto all = check_expansion(f, example_sets(), full2, 1000, std::nullopt);
    EXPECT_FALSE(all.passed);
    EXPECT_NEAR(all.margins.at("lambda"), 0.9, 1e-12);
}

TEST(Expansion, AffineSlopes)
{
    const map_family two(family_kind::affine, parameter_sequence::constant(2.0));
    const auto v = check_expansion(two, example_sets(), full2, 10, std::nullopt);
    EXPECT_TRUE(v.passed);
    EXPECT_DOUBLE_EQ(v.margins.at("lambda"), 2.0);
    const map_family half(family_kind::affine, parameter_sequence::constant(0.5));
    const auto w = check_expansion(half, example_sets(), full2, 10, std::nullopt);
    EXPECT_FALSE(w.passed);
    EXPECT_LE(w.margins.at("lambda"), 0.5 + 1e-12);
}

TEST(Expansion, LoopMissing)
{
    const transition_matrix a({{0, 1}, {1, 1}});
    EXPECT_THROW((void)check_expansion(logistic_const(4.5), example_sets(), a, 10, symbol{1}), loop_missing);
}

TEST(Equicontinuity, Bounds)
{
    EXPECT_LE(equicontinuity_bound(logistic_uniform(), example_sets(), 1000).margins.at("lipschitz"), 5.0);
    const map_family two(family_kind::affine, parameter_sequence::constant(2.0));
    EXPECT_DOUBLE_EQ(equicontinuity_bound(two, example_sets(), 10).margins.at("lipschitz"), 2.0);
    EXPECT_NEAR(equicontinuity_bound(logistic_const(4.5), example_sets(), 10).margins.at("lipschitz"), 4.5, 1e-15);
}

TEST(Cylinder, Examples)
{
    const auto f = logistic_const(4.5);
    const auto v = example_sets();
    const auto c0 = cylinder(f, v, {1}, 7);
    ASSERT_EQ(c0.set.size(), 1U);
    EXPECT_EQ(c0.set[0].lower, 0.0);
    EXPECT_EQ(c0.set[0].upper, 1.0 / 3.0);
    const auto c1 = cylinder(f, v, {1, 1}, 0);
    ASSERT_EQ(c1.set.size(), 1U);
    EXPECT_EQ(c1.set[0].lower, 0.0);
    EXPECT_NEAR(c1.set[0].upper, (1.0 - std::sqrt(1.0 - 4.0 / (3.0 * 4.5))) / 2.0, 1e-12);
    EXPECT_THROW((void)cylinder(f, v, {}, 0), config_error);
}

TEST(Cylinder, FlagsForbiddenPrefixes)
{
    const transition_matrix a({{0, 1}, {1, 1}});
    const auto c = cylinder(logistic_const(4.5), example_sets(), a, {1, 1, 2}, 0);
    EXPECT_FALSE(c.allowable);
}

TEST(Cylinder, NestingOverRandomPrefixes)
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> len(1, 15);
    std::uniform_int_distribution<std::size_t> base(0, 500);
    const auto f = logistic_uniform();
    const auto v = example_sets();
    for (int trial = 0; trial < 200; ++trial) {
        auto w = random_word(rng, static_cast<std::size_t>(len(rng)));
        const std::size_t n = base(rng);
        const auto c = cylinder(f, v, w, n);
        w.push_back(static_cast<symbol>(1 + trial % 2));
        const auto d = cylinder(f, v, w, n);
        ASSERT_FALSE(d.empty());
        EXPECT_GE(c.set.covering_slack(d.set), -1e-12);
        EXPECT_LE(d.diameter, c.diameter + 1e-12);
        EXPECT_TRUE(v.base(w.front()).contains(d.set));
    }
}

TEST(Cylinder, ForwardImagesFollowThePrefix)
{
    std::mt19937_64 rng(29);
    const auto f = logistic_uniform();
    const auto v = example_sets();
    for (int trial = 0; trial < 100; ++trial) {
        const auto w = random_word(rng, 12);
        const auto c = cylinder(f, v, w, 3);
        const double x = detail::representative(c.set);
        double y = x;
        for (std::size_t k = 0; k < w.size(); ++k) {
            // bracket error grows at most by the Lipschitz constant per step
            const double tol = 1e-12 * std::pow(5.0, static_cast<double>(k + 1)) + 1e-9;
            const auto& target = v.base(w[k]);
            EXPECT_GE(y, target.lower() - tol);
            EXPECT_LE(y, target.upper() + tol);
            y = f.value(3 + k, y);
        }
    }
}

TEST(Cylinder, CoupledExpansionImpliesNonemptyCylinders)
{
    const auto f = logistic_uniform();
    const auto v = example_sets();
    ASSERT_TRUE(check_coupled_expansion(f, v, full2, 300, true).passed);
    const auto nonempty = check_cylinders_nonempty(f, v, full2, 8, {0, 17, 123, 250});
    EXPECT_TRUE(nonempty.passed);
    EXPECT_EQ(nonempty.margins.at("empty_cylinders"), 0.0);
    EXPECT_EQ(nonempty.margins.at("words_tested"), 4.0 * 256.0);
}

TEST(Decay, ExampleBound)
{
    const auto f = logistic_uniform();
    const auto v = example_sets();
    const auto d = cylinder_decay_profile(f, v, {1}, 20, 100, 1e-3);
    EXPECT_TRUE(d.passed());
    EXPECT_NEAR(d.max_over_index[0], 1.0 / 3.0, 1e-15);
    for (std::size_t m = 0; m <= 20; ++m) {
        EXPECT_LE(d.max_over_index[m], std::pow(2.0 / 3.0, static_cast<double>(m)) / 3.0 + 1e-9) << m;
    }
    const auto depth = d.stabilization_depth(1e-2);
    ASSERT_TRUE(depth.has_value());
    EXPECT_LT(d.max_over_index[*depth], 1e-2);
    EXPECT_GE(d.max_over_index[*depth - 1], 1e-2);
}

TEST(Decay, ContractionFails)
{
    const map_family half(family_kind::affine, parameter_sequence::constant(0.5));
    const set_family v({interval_union{{0.0, 1.0}}, interval_union{{2.0, 3.0}}});
    const auto d = cylinder_decay_profile(half, v, {1}, 10, 5, 1e-3);
    EXPECT_FALSE(d.passed());
}

TEST(Witness, FixedPointStream)
{
    const auto f = logistic_uniform();
    const auto v = example_sets();
    const auto ones = symbol_stream::periodic({1});
    for (std::size_t depth : {0U, 5U, 20U, 35U}) {
        const auto w = witness_point(f, v, ones, depth);
        EXPECT_TRUE(w.enclosure.set.contains(0.0));
        EXPECT_LE(w.width(), std::pow(2.0 / 3.0, static_cast<double>(depth)) / 3.0 + 1e-9);
    }
}

TEST(Witness, EmptyCylinderReportsDepth)
{
    // f = 2x + 0.9 maps V1 = [0, 0.05] into [0.9, 1], missing V1.
    const map_family aff(family_kind::affine, parameter_sequence::constant(2.0), 0.9);
    const set_family v({interval_union{{0.0, 0.05}}, interval_union{{0.9, 1.0}}});
    try {
        (void)witness_point(aff, v, symbol_stream::periodic({1}), 6);
        FAIL();
    } catch (const empty_cylinder& e) {
        EXPECT_EQ(e.depth(), 1U);
    }
}

TEST(SetFamily, OverridesMustBeSubsets)
{
    auto v = example_sets();
    EXPECT_THROW(v.set_override(1, 3, interval_union{{0.2, 0.5}}), config_error);
    v.set_override(1, 3, interval_union{{0.0, 0.2}});
    EXPECT_EQ(v.at(1, 3).upper(), 0.2);
    EXPECT_EQ(v.at(1, 4).upper(), 1.0 / 3.0);
    EXPECT_THROW(set_family({interval_union{{0.0, 1.0}}}), config_error);
}

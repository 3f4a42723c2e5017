#include "ndschaos/symbolic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ndschaos;

namespace {

const transition_matrix full2{{{1, 1}, {1, 1}}};

// Explicit Eq.-style assembly of the gamma prefix: block k is
// beta[0..m_k) w3 w0 B_1 ... B_k.
symbol_word assemble_gamma(const symbol_word& beta, const std::vector<index_t>& m, const symbol_word& w0,
                           const symbol_word& w1, const symbol_word& w2, const symbol_word& w3,
                           const std::vector<int>& sel)
{
    symbol_word out;
    for (std::size_t k = 1; k <= m.size(); ++k) {
        out.insert(out.end(), beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(m[k - 1]));
        out.insert(out.end(), w3.begin(), w3.end());
        out.insert(out.end(), w0.begin(), w0.end());
        for (std::size_t i = 0; i < k; ++i) {
            const auto& b = sel[i] == 0 ? w1 : w2;
            out.insert(out.end(), b.begin(), b.end());
        }
    }
    return out;
}

} // namespace

TEST(SymbolStream, PeriodicAndShift)
{
    const auto s = symbol_stream::periodic({1, 2});
    EXPECT_EQ(s.prefix(5), (symbol_word{1, 2, 1, 2, 1}));
    EXPECT_EQ(shift(s, 1).prefix(4), (symbol_word{2, 1, 2, 1}));
    EXPECT_EQ(shift(s, 0).prefix(6), s.prefix(6));
    EXPECT_EQ(shift(shift(s, 3), 4).prefix(8), shift(s, 7).prefix(8));
    EXPECT_THROW((void)symbol_stream::periodic({}), config_error);
}

TEST(SymbolStream, WordStreamThenTail)
{
    const auto s = word_stream({2, 2, 1}, symbol_stream::periodic({1}));
    EXPECT_EQ(s.prefix(6), (symbol_word{2, 2, 1, 1, 1, 1}));
}

TEST(RhoDistance, Examples)
{
    const auto a = symbol_stream::periodic({1, 2});
    EXPECT_EQ(rho_distance(a, a, 64), 0);
    const auto ones = symbol_stream::periodic({1});
    const auto twos = symbol_stream::periodic({2});
    const rational d = rho_distance(ones, twos, 60);
    EXPECT_LT(rational(2) - d, rational(1, 1LL << 58));
    const auto b = word_stream({1, 1, 1, 2}, ones);
    EXPECT_EQ(rho_distance(ones, b, 4), rational(1, 8));
    EXPECT_EQ(rho_distance(ones, b, 40), rational(1, 8));
}

TEST(RhoDistance, SymmetricAndTriangle)
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> sym(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<symbol_word, 3> w;
        for (auto& x : w) {
            x.resize(30);
            for (auto& s : x) {
                s = sym(rng);
            }
        }
        const auto tail = symbol_stream::periodic({1});
        const auto a = word_stream(w[0], tail);
        const auto b = word_stream(w[1], tail);
        const auto c = word_stream(w[2], tail);
        EXPECT_EQ(rho_distance(a, b, 40), rho_distance(b, a, 40));
        EXPECT_LE(rho_distance(a, c, 40), rho_distance(a, b, 40) + rho_distance(b, c, 40));
    }
}

TEST(ScrambledFamily, SturmianPrefix)
{
    EXPECT_EQ(scrambled_family_element(std::sqrt(2.0) - 1.0, 7), (std::vector<int>{0, 1, 0, 1, 0, 0, 1}));
    EXPECT_THROW((void)scrambled_family_element(0.0, 3), parameter_out_of_range);
    EXPECT_THROW((void)scrambled_family_element(1.0, 3), parameter_out_of_range);
}

TEST(ScrambledFamily, PrefixCountMatchesFloor)
{
    // sum_{i<=n} b_i = floor((n+2) t) - floor(t)
    for (double t : {std::sqrt(2.0) - 1.0, (std::sqrt(5.0) - 1.0) / 2.0, std::sqrt(3.0) - 1.0}) {
        const auto bits = scrambled_family_element(t, 2000);
        long sum = 0;
        for (std::size_t n = 0; n < bits.size(); ++n) {
            sum += bits[n];
            EXPECT_EQ(sum, static_cast<long>(std::floor(static_cast<double>(n + 2) * t)));
        }
    }
}

TEST(ScrambledFamily, DistinctParametersAgreeAndDisagree)
{
    const auto a = scrambled_family_element(std::sqrt(2.0) - 1.0, 10000);
    const auto b = scrambled_family_element(std::sqrt(3.0) - 1.0, 10000);
    std::size_t agree = 0;
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        (a[i] == b[i] ? agree : disagree) += 1;
    }
    EXPECT_GT(agree, 0U);
    EXPECT_GT(disagree, 0U);
    // Disagreements grow at least like |floor(nt) - floor(nt')|.
    EXPECT_GE(disagree, static_cast<std::size_t>(10000 * (std::sqrt(3.0) - std::sqrt(2.0))) - 2);
}

TEST(GammaHat, FullShiftWordsAndPrefix)
{
    const auto beta = symbol_stream::periodic({1});
    const std::vector<index_t> m{1, 2, 3, 4};
    const std::vector<int> sel{1, 0, 1, 1};
    const auto g = build_gamma_hat(full2, beta, 1, m, sel, 4);
    EXPECT_EQ(g.schedule.omega0, (symbol_word{1}));
    EXPECT_EQ(g.schedule.omega1, (symbol_word{1, 1, 1}));
    EXPECT_EQ(g.schedule.omega2, (symbol_word{1, 2, 1}));
    EXPECT_EQ(g.schedule.omega3, (symbol_word{1}));
    EXPECT_EQ(g.schedule.l2, 3U);
    const auto expect = assemble_gamma(beta.prefix(10), m, g.schedule.omega0, g.schedule.omega1,
                                       g.schedule.omega2, g.schedule.omega3, sel);
    EXPECT_EQ(g.stream.prefix(expect.size()), expect);
    EXPECT_EQ(g.schedule.total_length, expect.size());
    EXPECT_EQ(g.stream.prefix(13), (symbol_word{1, 1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 2, 1}));
}

TEST(GammaHat, CheckpointFormulaMatchesMeasuredOffsets)
{
    const auto beta = symbol_stream::periodic({1});
    const std::vector<index_t> m{3, 7, 20, 41, 90, 200};
    const auto g = build_gamma_hat(full2, beta, 1, m, {0, 1, 1, 0, 1, 0}, 6);
    const auto& s = g.schedule;
    for (std::size_t k = 1; k <= 6; ++k) {
        EXPECT_EQ(gamma_checkpoint_formula(k, s.l1, s.l2, s.l3, s.m), s.omega3_offset[k - 1]);
        EXPECT_EQ(s.proximal[k - 1], s.block_start[k - 1]);
        // the window starting at the k-th block copies beta for m_k symbols
        EXPECT_EQ(g.stream.window(s.block_start[k - 1], m[k - 1]), beta.prefix(m[k - 1]));
    }
}

TEST(GammaHat, DistinctSelectorsGiveDistinctStreams)
{
    const auto beta = symbol_stream::periodic({1});
    const std::vector<index_t> m{1, 2, 3};
    const auto a = build_gamma_hat(full2, beta, 1, m, {0, 1, 0}, 3);
    const auto b = build_gamma_hat(full2, beta, 1, m, {0, 1, 1}, 3);
    EXPECT_NE(a.stream.prefix(a.schedule.total_length), b.stream.prefix(b.schedule.total_length));
    EXPECT_TRUE(is_allowable(full2, a.stream.prefix(200)));
}

TEST(GammaHat, RejectsBadInputs)
{
    const auto beta = symbol_stream::periodic({1});
    EXPECT_THROW((void)build_gamma_hat(full2, beta, 1, {2, 2}, {0, 0}, 2), not_increasing);
    EXPECT_THROW((void)build_gamma_hat(full2, beta, 1, {1, 2}, {0}, 2), selector_exhausted);
    EXPECT_THROW((void)build_gamma_hat(full2, beta, 2, {1, 2}, {0, 0}, 2), hypotheses_not_met);
    EXPECT_THROW((void)build_gamma_hat(transition_matrix({{0, 1}, {1, 0}}), symbol_stream::periodic({1, 2}), 1,
                                       {2}, {0}, 1),
                 hypotheses_not_met);
}

TEST(BetaHat, ScheduleIdentitiesAndBlocks)
{
    const auto b = build_beta_hat(full2, std::sqrt(2.0) - 1.0, {1}, 4);
    const auto& s = b.schedule;
    ASSERT_EQ(s.levels.size(), 4U);
    EXPECT_EQ(s.l, 3U);
    const std::vector<index_t> p{4, 284, 66464};
    const std::vector<index_t> ends{14, 923, 207700};
    for (std::size_t j = 1; j <= s.levels.size(); ++j) {
        const auto& lv = s.levels[j - 1];
        const index_t two_j = index_t{1} << j;
        EXPECT_EQ(lv.end, lv.p * s.l + lv.p / two_j);
        if (j >= 2) {
            EXPECT_EQ(lv.k, lv.m + lv.m / two_j);
            EXPECT_EQ(lv.m, two_j * lv.start);
        }
        if (j <= 3) {
            EXPECT_EQ(lv.p, p[j - 1]);
            EXPECT_EQ(lv.end, ends[j - 1]);
        }
        const auto& word = lv.bit == 0 ? s.omega1 : s.omega2;
        // the selected word repeated p_j times ends the level
        for (index_t r = 0; r < std::min<index_t>(lv.p, 50); ++r) {
            EXPECT_EQ(b.stream.window(lv.omega0_end + r * s.l, s.l), word);
        }
        if (j + 1 <= s.levels.size()) {
            EXPECT_EQ(s.levels[j].start, lv.end);
        }
    }
    EXPECT_EQ(s.levels[1].m, 56U);
    EXPECT_EQ(s.levels[1].k, 70U);
    EXPECT_EQ(s.levels[2].m, 7384U);
    EXPECT_EQ(s.levels[2].k, 8307U);
    EXPECT_EQ(s.bits, scrambled_family_element(std::sqrt(2.0) - 1.0, 4));
}

TEST(BetaHat, FirstRepetitionCountIsTwiceHeaderLength)
{
    // r0 = 3, l0 = 2, m0 = 1, omega0 = (1,2): |(r0, omega0)| = 3.
    const transition_matrix a({{0, 1, 0}, {0, 1, 1}, {1, 1, 0}});
    const auto b = build_beta_hat(a, std::sqrt(2.0) - 1.0, {3, 1, 2}, 2);
    EXPECT_EQ(b.schedule.omega0, (symbol_word{1, 2}));
    EXPECT_EQ(b.schedule.levels[0].p, 6U);
    EXPECT_TRUE(is_allowable(a, b.stream.prefix(b.schedule.levels[1].end + 10)));
}

TEST(BetaHat, StreamsAreAllowable)
{
    const auto b = build_beta_hat(full2, 0.618, {1, 2}, 3);
    EXPECT_TRUE(is_allowable(full2, b.stream.prefix(b.schedule.levels.back().end + 20)));
}

TEST(BetaHat, ScheduleCheckRejectsTampering)
{
    auto b = build_beta_hat(full2, 0.618, {1}, 3);
    auto s = b.schedule;
    s.levels[1].end += 1;
    EXPECT_THROW(verify_beta_schedule(s), schedule_inconsistent);
}

TEST(BetaHat, OverflowIsReported)
{
    EXPECT_THROW((void)build_beta_hat(full2, 0.618, {1}, 8), schedule_inconsistent);
}

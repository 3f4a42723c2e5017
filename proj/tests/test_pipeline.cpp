#include "ndschaos/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ndschaos;

namespace {

run_config small_config()
{
    const char* d = std::getenv("NDSCHAOS_CONFIG_DIR");
    auto c = load_config(std::string(d != nullptr ? d : "configs") + "/example51.toml");
    c.horizon = 200;
    c.stats_horizon = 600;
    c.window = 30;
    c.witness_depth = 30;
    c.levels = 3;
    return c;
}

json full_report(const run_config& cfg)
{
    const auto ctx = make_context(cfg);
    auto report = make_report(ctx.cfg);
    report["verification"] = run_verify(ctx).section;
    json cons = json::array();
    for (const auto& t : ctx.cfg.theorems) {
        cons.push_back(run_construct(ctx, t, ctx.cfg.levels).section);
    }
    report["construction"] = cons;
    report["statistics"] = run_stats(ctx).section;
    return report;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(Applicability, IsTheConjunctionOfItsHypotheses)
{
    std::map<std::string, bool> all_true;
    for (const auto& [name, needs] : applicability_rules()) {
        for (const auto& h : needs) {
            all_true[h] = true;
        }
    }
    const auto ok = applicability(all_true);
    for (const auto& [name, needs] : applicability_rules()) {
        EXPECT_TRUE(ok.at(name).at("applicable").get<bool>()) << name;
        for (const auto& h : needs) {
            auto one_off = all_true;
            one_off[h] = false;
            EXPECT_FALSE(applicability(one_off).at(name).at("applicable").get<bool>()) << name << " " << h;
        }
    }
}

TEST(Applicability, TamperedReportIsDetected)
{
    const auto ctx = make_context(small_config());
    auto v = run_verify(ctx).section;
    EXPECT_NO_THROW(check_applicability(v));
    v["hypotheses"]["coupled_expansion"] = false;
    EXPECT_THROW(check_applicability(v), schedule_inconsistent);
}

TEST(Verify, ExampleSystemSummary)
{
    const auto ctx = make_context(small_config());
    const auto r = run_verify(ctx);
    EXPECT_TRUE(r.passed);
    const auto& a = r.section.at("applicability");
    EXPECT_TRUE(a.at("theorem-3.1").at("applicable").get<bool>());
    EXPECT_TRUE(a.at("corollary-3.1").at("applicable").get<bool>());
    EXPECT_TRUE(a.at("theorem-4.2").at("applicable").get<bool>());
    EXPECT_TRUE(a.at("corollary-4.2").at("applicable").get<bool>());
    EXPECT_FALSE(a.at("corollary-4.1").at("applicable").get<bool>());
    EXPECT_NEAR(r.section.at("delta").get<double>(), 4.0 / 15.0, 1e-15);
    ASSERT_FALSE(r.files.empty());
    EXPECT_EQ(r.files.front().name, "decay.csv");
    EXPECT_EQ(r.files.front().content.rfind("m,n,diameter\n", 0), 0U);
}

TEST(Verify, ConstantThreeFailsRequirements)
{
    auto c = small_config();
    c.parameters.kind = "constant";
    c.parameters.value = 3.0;
    const auto r = run_verify(make_context(c));
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.section.at("hypotheses").at("coupled_expansion").get<bool>());
}

TEST(Construct, WitnessesAreDistinct)
{
    const auto ctx = make_context(small_config());
    const auto g = run_construct(ctx, "3.1", 3);
    EXPECT_TRUE(g.passed);
    EXPECT_TRUE(g.section.at("distinct_enclosures").get<bool>());
    for (const auto& w : g.section.at("witnesses")) {
        EXPECT_LE(w.at("width").get<double>(), 1e-6);
    }

    // Selector bits (0,1,0), (1,0,1), (1,1,0): the last two streams first
    // differ at level 2, beyond the witness depth, so only pairs with
    // different level-1 bits have disjoint depth-30 enclosures.
    const auto b = run_construct(ctx, "4.2", 3);
    const auto& ws = b.section.at("witnesses");
    ASSERT_EQ(ws.size(), 3U);
    EXPECT_EQ(ws[1].at("enclosure"), ws[2].at("enclosure"));
    EXPECT_FALSE(b.passed);
    const auto hi0 = ws[0].at("enclosure")[0][1].get<double>();
    const auto lo1 = ws[1].at("enclosure")[0][0].get<double>();
    EXPECT_LT(hi0, lo1);

    EXPECT_THROW((void)run_construct(ctx, "5.1", 3), config_error);
    EXPECT_THROW((void)run_construct(ctx, "4.2", 0), config_error);
}

TEST(Report, DeterministicBytes)
{
    const auto cfg = small_config();
    const auto a = full_report(cfg).dump(2);
    const auto b = full_report(cfg).dump(2);
    EXPECT_EQ(a, b);
    auto other = cfg;
    other.parameters.seed += 1;
    EXPECT_NE(full_report(other).dump(2), a);
}

TEST(Report, SectionsAndCrossCheck)
{
    const auto r = full_report(small_config());
    EXPECT_EQ(r.at("schema"), report_schema);
    EXPECT_TRUE(r.contains("config"));
    const auto& s = r.at("statistics");
    EXPECT_NE(s.at("cross_check").at("verdict"), "inconsistent");
    for (const auto& t : s.at("theorems")) {
        EXPECT_EQ(t.at("pairs").size(), 3U);
        for (const auto& p : t.at("pairs")) {
            EXPECT_TRUE(p.at("both_bounded").get<bool>());
            if (t.at("theorem") == "3.1") {
                EXPECT_TRUE(p.at("liyorke").at("evidence").get<bool>());
                for (const auto& row : p.at("liyorke").at("checkpoint_table")) {
                    EXPECT_TRUE(row.at("within_bound").get<bool>());
                }
            }
        }
    }
}

TEST(Report, WritesFiles)
{
    const auto dir = std::filesystem::temp_directory_path() / "ndschaos_pipeline_test";
    std::filesystem::remove_all(dir);
    const auto ctx = make_context(small_config());
    auto report = make_report(ctx.cfg);
    const auto v = run_verify(ctx);
    report["verification"] = v.section;
    write_outputs(dir.string(), "verify.json", report, v.files);
    const auto text = slurp(dir / "verify.json");
    EXPECT_EQ(json::parse(text), report);
    EXPECT_TRUE(std::filesystem::exists(dir / "decay.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Report, InducedSystemRuns)
{
    auto c = small_config();
    c.induced = induced_spec{2, 0, {}};
    c.theorems = {"3.1"};
    c.cylinder_depth = 6;
    c.cylinder_index_horizon = 10;
    c.witness_depth = 8;
    c.window = 8;
    c.stats_horizon = 150;
    const auto ctx = make_context(c);
    EXPECT_TRUE(ctx.f->is_induced());
    const auto v = run_verify(ctx);
    EXPECT_EQ(v.section.at("system"), "induced");
    const auto& h = v.section.at("hypotheses");
    EXPECT_TRUE(h.at("coupled_expansion").get<bool>());
    // f_{2n+1}(f_{2n}(V1)) reaches V1 from both ends of V1, so cylinder hulls
    // keep diameter near 1/3 and the decay hypothesis fails.
    EXPECT_FALSE(h.at("decay_beta").get<bool>());
    EXPECT_FALSE(v.passed);
    const auto s = run_stats(ctx);
    EXPECT_EQ(s.section.at("theorems").size(), 1U);
}

#pragma once

// verify -> construct -> simulate -> report orchestration and report emission.

#include "ndschaos/config.hpp"
#include "ndschaos/statistics.hpp"
#include "ndschaos/symbolic.hpp"
#include "ndschaos/verifier.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace ndschaos {

using json = nlohmann::ordered_json;

inline constexpr const char* report_schema = "ndschaos-report/1";

// Everything a run needs, built once from the configuration.
struct run_context {
    run_config cfg;
    transition_matrix a;
    set_family v;
    map_family_ptr f;
};

namespace detail {

inline std::size_t required_extent(const run_config& c)
{
    std::size_t e = c.horizon + 1;
    e = std::max(e, c.cylinder_index_horizon + c.cylinder_depth + 1);
    e = std::max(e, c.witness_depth + 1);
    e = std::max(e, c.stats_horizon + c.window + 1);
    // Checkpoint bounds read the beta cylinder of length m_k from index
    // n_k - m_k <= H, and m_k never exceeds that offset by more than m_1.
    const auto m1 = static_cast<std::size_t>(std::max<std::int64_t>(0, c.m_slope + c.m_offset));
    e = std::max(e, 2 * c.stats_horizon + m1 + c.window + 1);
    return e + 1;
}

inline set_family build_sets(const run_config& c)
{
    std::vector<interval_union> base;
    for (const auto& s : c.sets) {
        base.push_back(build_union(s));
    }
    set_family v(std::move(base));
    for (const auto& o : c.overrides) {
        v.set_override(o.symbol_index, o.index, build_union(o.intervals));
    }
    return v;
}

} // namespace detail

[[nodiscard]] inline run_context make_context(run_config cfg)
{
    validate(cfg);
    auto a = build_matrix(cfg);
    auto v = detail::build_sets(cfg);
    auto f = build_family(cfg, detail::required_extent(cfg));
    return {std::move(cfg), std::move(a), std::move(v), std::move(f)};
}

namespace detail {

inline json finite_or_null(double x)
{
    if (std::isfinite(x)) {
        return x;
    }
    return nullptr;
}

inline json to_json(const interval_union& u)
{
    json out = json::array();
    for (const auto& c : u) {
        out.push_back(json::array({c.lower, c.upper}));
    }
    return out;
}

inline json to_json(const symbol_word& w)
{
    json out = json::array();
    for (symbol s : w) {
        out.push_back(s);
    }
    return out;
}

inline json to_json(const verdict& v, std::size_t max_failures = 20)
{
    json margins = json::object();
    for (const auto& [k, x] : v.margins) {
        margins[k] = finite_or_null(x);
    }
    json failing = json::array();
    std::size_t count = 0;
    for (const auto& r : v.per_index) {
        if (!r.passed) {
            if (failing.size() < max_failures) {
                failing.push_back(json{{"n", r.n}, {"margin", finite_or_null(r.margin)}});
            }
            ++count;
        }
    }
    return json{{"hypothesis", v.hypothesis},
                {"passed", v.passed},
                {"horizon_limited", v.horizon_limited},
                {"indices_checked", v.per_index.size()},
                {"indices_failed", count},
                {"margins", margins},
                {"failing_indices", failing},
                {"notes", v.notes}};
}

inline json to_json(const decay_profile& p)
{
    json maxima = json::array();
    for (double d : p.max_over_index) {
        maxima.push_back(d);
    }
    return json{{"passed", p.passed()},
                {"non_increasing", p.non_increasing},
                {"below_threshold", p.below_threshold},
                {"threshold", p.threshold},
                {"max_depth", p.max_over_index.size() - 1},
                {"index_horizon", p.diameter.size() - 1},
                {"max_over_index", maxima}};
}

inline std::string decay_csv(const decay_profile& p)
{
    std::ostringstream os;
    os << std::setprecision(17) << "m,n,diameter\n";
    for (std::size_t m = 0; m < p.max_over_index.size(); ++m) {
        for (std::size_t n = 0; n < p.diameter.size(); ++n) {
            os << m << ',' << n << ',' << p.diameter[n][m] << '\n';
        }
    }
    return os.str();
}

} // namespace detail

// Results whose hypotheses are checked, each as a conjunction of named verdicts.
[[nodiscard]] inline const std::vector<std::pair<std::string, std::vector<std::string>>>& applicability_rules()
{
    static const std::vector<std::pair<std::string, std::vector<std::string>>> rules = {
        {"theorem-3.1", {"irreducible_with_branching_row", "sets_separated", "cylinders_nonempty", "decay_beta"}},
        {"corollary-3.1", {"irreducible_with_branching_row", "sets_separated", "coupled_expansion", "decay_beta"}},
        {"theorem-4.2",
         {"irreducible_with_branching_row", "sets_separated", "coupled_expansion", "equicontinuity", "decay_gamma"}},
        {"corollary-4.1",
         {"irreducible_with_branching_row", "sets_separated", "coupled_expansion", "equicontinuity",
          "expansion_all"}},
        {"corollary-4.2",
         {"irreducible_with_branching_row", "sets_separated", "coupled_expansion", "equicontinuity",
          "expansion_loop"}},
    };
    return rules;
}

[[nodiscard]] inline json applicability(const std::map<std::string, bool>& hyps)
{
    json out = json::object();
    for (const auto& [name, needs] : applicability_rules()) {
        bool ok = true;
        json req = json::object();
        for (const auto& h : needs) {
            const auto it = hyps.find(h);
            const bool v = it != hyps.end() && it->second;
            req[h] = v;
            ok = ok && v;
        }
        out[name] = json{{"applicable", ok}, {"hypotheses", req}};
    }
    return out;
}

// Recomputes every applicability flag from its recorded hypothesis verdicts.
inline void check_applicability(const json& verification)
{
    const auto& hyps = verification.at("hypotheses");
    for (const auto& [name, entry] : verification.at("applicability").items()) {
        bool ok = true;
        for (const auto& [h, v] : entry.at("hypotheses").items()) {
            ok = ok && hyps.at(h).get<bool>() && v.get<bool>();
        }
        if (ok != entry.at("applicable").get<bool>()) {
            throw schedule_inconsistent("applicability flag for " + name + " disagrees with its hypotheses");
        }
    }
}

struct artifact {
    std::string name;
    std::string content;
};

struct stage_result {
    json section;
    std::vector<artifact> files;
    bool passed = true;
};

[[nodiscard]] inline stage_result run_verify(const run_context& ctx)
{
    const auto& c = ctx.cfg;
    stage_result out;
    std::map<std::string, bool> hyps;

    const bool irr = is_irreducible(ctx.a);
    const auto branch = branching_row(ctx.a);
    hyps["irreducible_with_branching_row"] = irr && branch.has_value();
    json transition{{"size", ctx.a.size()},
                    {"matrix", ctx.a.entries()},
                    {"irreducible", irr},
                    {"branching_row", branch ? json(*branch) : json(nullptr)}};

    const double delta = delta_separation(ctx.v);
    const auto ce = check_coupled_expansion(*ctx.f, ctx.v, ctx.a, c.horizon, c.strict_separation, c.inclusion_slack);
    hyps["sets_separated"] = delta > 0.0;
    hyps["coupled_expansion"] = ce.passed;

    const auto exp_all = check_expansion(*ctx.f, ctx.v, ctx.a, c.horizon, std::nullopt, c.expansion);
    hyps["expansion_all"] = exp_all.passed;

    std::optional<verdict> exp_loop;
    std::optional<symbol> j0 = c.expansion_symbol;
    if (!j0) {
        // Symbol with a self-transition and the largest expansion constant.
        double best = -1.0;
        for (symbol s = 1; s <= static_cast<symbol>(ctx.a.size()); ++s) {
            if (!ctx.a.allows(s, s)) {
                continue;
            }
            auto e = check_expansion(*ctx.f, ctx.v, ctx.a, c.horizon, s, c.expansion);
            if (e.margins.at("lambda") > best) {
                best = e.margins.at("lambda");
                j0 = s;
                exp_loop = std::move(e);
            }
        }
    } else {
        exp_loop = check_expansion(*ctx.f, ctx.v, ctx.a, c.horizon, j0, c.expansion);
    }
    hyps["expansion_loop"] = exp_loop && exp_loop->passed;

    const auto eq = equicontinuity_bound(*ctx.f, ctx.v, c.horizon);
    hyps["equicontinuity"] = eq.passed;

    std::vector<std::size_t> bases;
    const std::size_t nonempty_indices = std::min<std::size_t>(c.horizon, 64);
    for (std::size_t n = 0; n < nonempty_indices; ++n) {
        bases.push_back(n);
    }
    const auto ne = check_cylinders_nonempty(*ctx.f, ctx.v, ctx.a, c.nonempty_word_length, bases, c.tau);
    hyps["cylinders_nonempty"] = ne.passed;

    auto profile_for = [&](const symbol_word& cycle) -> std::optional<decay_profile> {
        if (!is_allowable(ctx.a, cycle) || !ctx.a.allows(cycle.back(), cycle.front())) {
            return std::nullopt;
        }
        return cylinder_decay_profile(*ctx.f, ctx.v, cycle, c.cylinder_depth, c.cylinder_index_horizon,
                                      c.decay_threshold, c.tau);
    };
    const auto decay_beta = profile_for(c.beta_cycle);
    const auto decay_gamma = profile_for(c.gamma_cycle);
    hyps["decay_beta"] = decay_beta && decay_beta->passed();
    hyps["decay_gamma"] = decay_gamma && decay_gamma->passed();

    json hj = json::object();
    for (const auto& [k, v] : hyps) {
        hj[k] = v;
    }
    auto appl = applicability(hyps);

    json sets = json::array();
    for (const auto& s : ctx.v.bases()) {
        sets.push_back(detail::to_json(s));
    }
    out.section = json{{"system", ctx.f->is_induced() ? "induced" : "base"},
                       {"transition", transition},
                       {"sets", sets},
                       {"delta", delta},
                       {"coupled_expansion", detail::to_json(ce)},
                       {"expansion_all", detail::to_json(exp_all)},
                       {"expansion_loop", exp_loop ? detail::to_json(*exp_loop) : json(nullptr)},
                       {"expansion_symbol", j0 ? json(*j0) : json(nullptr)},
                       {"equicontinuity", detail::to_json(eq)},
                       {"cylinders_nonempty", detail::to_json(ne)},
                       {"decay_beta", decay_beta ? detail::to_json(*decay_beta) : json(nullptr)},
                       {"decay_gamma", decay_gamma ? detail::to_json(*decay_gamma) : json(nullptr)},
                       {"hypotheses", hj},
                       {"applicability", appl}};
    if (ctx.f->is_induced()) {
        out.section["notes"] = json::array(
            {"hypotheses checked on the induced system; Li-Yorke conclusions transfer to the base system "
             "through the subsequence"});
    }
    check_applicability(out.section);
    for (const auto& r : c.require) {
        out.passed = out.passed && appl.at(r).at("applicable").get<bool>();
    }
    if (decay_gamma) {
        out.files.push_back({"decay.csv", detail::decay_csv(*decay_gamma)});
    }
    if (decay_beta && c.beta_cycle != c.gamma_cycle) {
        out.files.push_back({"decay_beta.csv", detail::decay_csv(*decay_beta)});
    }
    return out;
}

// Witness sequences built from the configured selectors.
struct witness_family {
    std::string theorem;
    std::vector<symbol_stream> streams;
    std::vector<gamma_schedule> gamma;
    std::vector<beta_schedule> beta;
};

[[nodiscard]] inline std::vector<index_t> gamma_bounds(const run_config& c, std::size_t blocks)
{
    std::vector<index_t> m;
    for (std::size_t k = 1; k <= blocks; ++k) {
        const std::int64_t v = c.m_slope * static_cast<std::int64_t>(k) + c.m_offset;
        if (v < 1) {
            throw not_increasing("m_k = " + std::to_string(v) + " at k = " + std::to_string(k));
        }
        m.push_back(static_cast<index_t>(v));
    }
    return m;
}

// Smallest number of gamma blocks whose assembled prefix covers `length`.
[[nodiscard]] inline std::size_t gamma_blocks_for(const run_config& c, const transition_matrix& a,
                                                  std::size_t length)
{
    std::size_t blocks = std::max<std::size_t>(1, c.gamma_blocks);
    const auto beta = symbol_stream::periodic(c.beta_cycle);
    while (true) {
        const std::vector<int> zeros(blocks, 0);
        const auto g = build_gamma_hat(a, beta, c.s0, gamma_bounds(c, blocks), zeros, blocks);
        if (g.schedule.total_length >= length) {
            return blocks;
        }
        blocks *= 2;
    }
}

[[nodiscard]] inline witness_family build_witnesses(const run_context& ctx, const std::string& theorem,
                                                    std::size_t gamma_blocks, std::size_t levels)
{
    const auto& c = ctx.cfg;
    if (c.selectors.size() < 2) {
        throw config_error("construct.selectors", "at least two selector parameters are required");
    }
    witness_family w;
    w.theorem = theorem;
    for (double t : c.selectors) {
        if (theorem == "3.1") {
            const auto bits = scrambled_family_element(t, gamma_blocks);
            auto g = build_gamma_hat(ctx.a, symbol_stream::periodic(c.beta_cycle), c.s0,
                                     gamma_bounds(c, gamma_blocks), bits, gamma_blocks);
            w.streams.push_back(g.stream);
            w.gamma.push_back(std::move(g.schedule));
        } else {
            auto b = build_beta_hat(ctx.a, t, c.gamma_cycle, levels);
            w.streams.push_back(b.stream);
            w.beta.push_back(std::move(b.schedule));
        }
    }
    return w;
}

namespace detail {

inline json gamma_schedule_json(const gamma_schedule& s)
{
    json blocks = json::array();
    for (std::size_t k = 0; k < s.m.size(); ++k) {
        blocks.push_back(json{{"k", k + 1},
                              {"m", s.m[k]},
                              {"n_formula", s.n[k]},
                              {"omega3_offset", s.omega3_offset[k]},
                              {"proximal_checkpoint", s.proximal[k]},
                              {"block_start", s.block_start[k]},
                              {"formula_matches", s.n[k] == s.omega3_offset[k]}});
    }
    return json{{"t0", s.t0},
                {"r0", s.r0},
                {"omega0", to_json(s.omega0)},
                {"omega1", to_json(s.omega1)},
                {"omega2", to_json(s.omega2)},
                {"omega3", to_json(s.omega3)},
                {"l1", s.l1},
                {"l2", s.l2},
                {"l3", s.l3},
                {"total_length", s.total_length},
                {"blocks", blocks}};
}

inline json beta_schedule_json(const beta_schedule& s)
{
    json levels = json::array();
    for (std::size_t j = 0; j < s.levels.size(); ++j) {
        const auto& lv = s.levels[j];
        const index_t two_j = index_t{1} << (j + 1);
        levels.push_back(json{{"level", j + 1},
                              {"bit", lv.bit},
                              {"start", lv.start},
                              {"m", lv.m},
                              {"k", lv.k},
                              {"return_length", lv.return_length},
                              {"omega0_end", lv.omega0_end},
                              {"p", lv.p},
                              {"n", lv.end},
                              {"n_identity", lv.end == lv.p * s.l + lv.p / two_j},
                              {"k_identity", j == 0 || lv.k == lv.m + lv.m / two_j}});
    }
    return json{{"r0", s.r0},
                {"l0", s.l0},
                {"m0", s.m0},
                {"cycle", to_json(s.cycle)},
                {"omega0", to_json(s.omega0)},
                {"omega1", to_json(s.omega1)},
                {"omega2", to_json(s.omega2)},
                {"l", s.l},
                {"levels", levels}};
}

} // namespace detail

[[nodiscard]] inline stage_result run_construct(const run_context& ctx, const std::string& theorem,
                                                std::size_t levels)
{
    const auto& c = ctx.cfg;
    if (theorem != "3.1" && theorem != "4.2") {
        throw config_error("--theorem", "expected 3.1 or 4.2");
    }
    if (levels < 1) {
        throw config_error("--levels", "levels must be >= 1");
    }
    stage_result out;
    const std::size_t blocks = c.gamma_blocks;
    const auto w = build_witnesses(ctx, theorem, blocks, levels);
    json witnesses = json::array();
    std::vector<interval_union> enclosures;
    for (std::size_t i = 0; i < w.streams.size(); ++i) {
        const auto pt = witness_point(*ctx.f, ctx.v, w.streams[i], c.witness_depth, 0, c.tau);
        enclosures.push_back(pt.enclosure.set);
        const auto bits = theorem == "3.1" ? scrambled_family_element(c.selectors[i], blocks)
                                           : w.beta[i].bits;
        witnesses.push_back(json{{"selector", c.selectors[i]},
                                 {"selector_bits", bits},
                                 {"prefix", detail::to_json(w.streams[i].prefix(c.prefix_length))},
                                 {"depth", c.witness_depth},
                                 {"point", pt.point},
                                 {"enclosure", detail::to_json(pt.enclosure.set)},
                                 {"width", pt.width()}});
    }
    bool distinct = true;
    for (std::size_t i = 0; i < enclosures.size(); ++i) {
        for (std::size_t j = i + 1; j < enclosures.size(); ++j) {
            distinct = distinct && enclosures[i].overlap_measure(enclosures[j]) == 0.0 &&
                       !(enclosures[i] == enclosures[j]);
        }
    }
    out.section = json{{"theorem", theorem},
                       {"schedule", theorem == "3.1" ? detail::gamma_schedule_json(w.gamma.front())
                                                     : detail::beta_schedule_json(w.beta.front())},
                       {"witnesses", witnesses},
                       {"distinct_enclosures", distinct}};
    if (theorem == "4.2") {
        json per = json::array();
        for (const auto& s : w.beta) {
            per.push_back(s.bits);
        }
        out.section["level_bits"] = per;
    }
    out.passed = distinct;
    return out;
}

namespace detail {

inline std::string distance_csv(const pair_statistics& s)
{
    std::ostringstream os;
    os << std::setprecision(17) << "index,distance\n";
    for (std::size_t n = 0; n < s.distance.size(); ++n) {
        os << n << ',' << s.distance[n] << '\n';
    }
    return os.str();
}

inline std::string density_csv(const distributional_result& r, std::size_t stride)
{
    std::ostringstream os;
    os << std::setprecision(17) << "checkpoint,epsilon,density\n";
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        if (i % stride != 0 && i + 1 != r.checkpoints.size()) {
            continue;
        }
        for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
            os << r.checkpoints[i] << ',' << r.epsilons[e] << ',' << r.density(e, i) << '\n';
        }
        os << r.checkpoints[i] << ',' << r.delta << ',' << r.delta_density(i) << '\n';
    }
    return os.str();
}

inline json densities_json(const distributional_result& r)
{
    json upper = json::array();
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
        upper.push_back(json{{"epsilon", r.epsilons[e]}, {"upper_density_surrogate", r.upper_density[e]}});
    }
    json out{{"checkpoints", r.checkpoints.size()},
             {"delta", r.delta},
             {"upper_density", upper},
             {"lower_delta_density_surrogate", r.lower_delta_density},
             {"evidence", r.evidence}};
    if (!r.at_closeness.empty() || !r.at_separation.empty()) {
        json close = json::array();
        for (const auto& row : r.at_closeness) {
            json counts = json::array();
            for (std::size_t e = 0; e < row.counts.size(); ++e) {
                counts.push_back(json{{"epsilon", r.epsilons[e]},
                                      {"count", row.counts[e]},
                                      {"density", static_cast<double>(row.counts[e]) / static_cast<double>(row.k)}});
            }
            close.push_back(json{{"k", row.k}, {"m", row.m}, {"counts", counts}});
        }
        json sep = json::array();
        for (const auto& row : r.at_separation) {
            sep.push_back(json{{"n", row.n},
                               {"p", row.p},
                               {"l", row.l},
                               {"delta_close_count", row.delta_close},
                               {"density", static_cast<double>(row.delta_close) / static_cast<double>(row.n)},
                               {"proof_bound", row.bound},
                               {"within_proof_bound", row.delta_close <= row.bound}});
        }
        out["closeness_checkpoints"] = close;
        out["separation_checkpoints"] = sep;
    }
    return out;
}

// Theorem 4.2 checkpoints for a pair: k_j at every level, n_i at levels whose
// selector bits differ.
inline schedule_checkpoints beta_checkpoints(const beta_schedule& x, const beta_schedule& y)
{
    schedule_checkpoints s;
    for (std::size_t j = 0; j < x.levels.size(); ++j) {
        const auto& lv = x.levels[j];
        if (j > 0) {
            s.close.push_back({lv.k, lv.m});
        }
        if (x.bits[j] != y.bits[j]) {
            s.separate.push_back({lv.end, lv.p, x.l});
        }
    }
    return s;
}

} // namespace detail

[[nodiscard]] inline stage_result run_stats(const run_context& ctx)
{
    const auto& c = ctx.cfg;
    stage_result out;
    const double delta = delta_separation(ctx.v);
    const auto grid = default_epsilon_grid(delta, c.epsilon_count);
    const std::size_t H = c.stats_horizon;
    json theorems = json::array();
    std::size_t consistent = 0, inconsistent = 0, inconclusive = 0;
    bool ly_any = false, dist_any = false;

    for (const auto& theorem : c.theorems) {
        const std::size_t blocks = theorem == "3.1" ? gamma_blocks_for(c, ctx.a, H + c.window + 1) : 0;
        const auto w = build_witnesses(ctx, theorem, blocks, c.levels);
        std::vector<orbit_trace> traces;
        for (const auto& s : w.streams) {
            traces.push_back(shadow_orbit(*ctx.f, ctx.v, s, H, c.window, c.tau));
        }
        json pairs = json::array();
        for (std::size_t i = 0; i < traces.size(); ++i) {
            for (std::size_t j = i + 1; j < traces.size(); ++j) {
                const std::string tag = theorem + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
                std::optional<std::vector<std::size_t>> ly_checks;
                json checkpoint_rows = json::array();
                if (theorem == "3.1" && c.checkpoints == "schedule") {
                    ly_checks.emplace();
                    const auto& sch = w.gamma[i];
                    for (std::size_t k = 0; k < sch.proximal.size(); ++k) {
                        if (sch.proximal[k] <= H) {
                            ly_checks->push_back(sch.proximal[k]);
                        }
                    }
                } else if (theorem == "4.2" && c.checkpoints == "schedule") {
                    // Level starts: both streams continue with the same gamma prefix.
                    ly_checks.emplace();
                    for (std::size_t l = 1; l < w.beta[i].levels.size(); ++l) {
                        if (w.beta[i].levels[l].start <= H) {
                            ly_checks->push_back(w.beta[i].levels[l].start);
                        }
                    }
                }
                liyorke_options lo;
                lo.proximity_tolerance = c.proximity;
                lo.separation_tolerance = c.separation;
                const auto ly = liyorke_statistics(traces[i], traces[j], delta, ly_checks, lo);
                if (theorem == "3.1" && ly_checks) {
                    const auto beta = symbol_stream::periodic(c.beta_cycle);
                    const auto& sch = w.gamma[i];
                    for (std::size_t k = 0; k < ly_checks->size(); ++k) {
                        const auto at = (*ly_checks)[k];
                        const auto bound = cylinder(*ctx.f, ctx.v, beta.prefix(sch.m[k] + 1), at, c.tau).diameter;
                        const double slack = ly.stats.slack[at];
                        const double d = ly.stats.distance[at];
                        checkpoint_rows.push_back(json{{"k", k + 1},
                                                       {"index", at},
                                                       {"m", sch.m[k]},
                                                       {"distance", d},
                                                       {"cylinder_bound", bound},
                                                       {"enclosure_slack", slack},
                                                       {"within_bound", d <= bound + slack + c.tau}});
                    }
                }

                const auto seq = alternating_checkpoints(traces[i], traces[j], grid.front(), delta, c.density);
                distributional_options dopt;
                dopt.density_tolerance = c.density;
                std::optional<distributional_result> along;
                if (!seq.indices.empty()) {
                    along = distributional_statistics(traces[i], traces[j], seq.indices, grid, delta, {}, dopt);
                }
                const distributional_result* dref = along ? &*along : nullptr;
                consistency cc = consistency::inconclusive;
                if (dref != nullptr) {
                    cc = cross_check_equivalence(ly, *dref, seq.completed_phases);
                } else if (!ly.evidence()) {
                    cc = H >= 100 ? consistency::consistent : consistency::inconclusive;
                }
                switch (cc) {
                case consistency::consistent: ++consistent; break;
                case consistency::inconsistent: ++inconsistent; break;
                case consistency::inconclusive: ++inconclusive; break;
                }
                const bool dist_seq = dref != nullptr && dref->evidence;
                ly_any = ly_any || ly.evidence();
                dist_any = dist_any || dist_seq;

                json pj{{"pair", json::array({i + 1, j + 1})},
                        {"selectors", json::array({c.selectors[i], c.selectors[j]})},
                        {"liyorke",
                         json{{"label", "finite-horizon surrogates"},
                              {"max_distance", ly.stats.max_distance},
                              {"max_at", ly.stats.argmax},
                              {"min_distance", ly.stats.min_distance},
                              {"proximal_min", detail::finite_or_null(ly.proximal_min)},
                              {"proximal_at", ly.proximal_at},
                              {"checkpoints", ly.checkpoints.size()},
                              {"liminf_surrogate", ly.liminf_surrogate},
                              {"limsup_surrogate", ly.limsup_surrogate},
                              {"tail_window", ly.tail_window},
                              {"proximal", ly.proximal},
                              {"separated", ly.separated},
                              {"evidence", ly.evidence()}}},
                        {"both_bounded", traces[i].bounded && traces[j].bounded},
                        {"max_enclosure_width",
                         *std::max_element(ly.stats.slack.begin(), ly.stats.slack.end()) / 2.0}};
                if (!checkpoint_rows.empty()) {
                    pj["liyorke"]["checkpoint_table"] = checkpoint_rows;
                }
                pj["distributional_in_sequence"] =
                    json{{"construction", "alternating closeness/separation phases"},
                         {"epsilon", grid.front()},
                         {"completed_phases", seq.completed_phases},
                         {"statistics", dref ? detail::densities_json(*dref) : json(nullptr)}};
                if (theorem == "4.2") {
                    std::vector<std::size_t> all(H + 1);
                    for (std::size_t n = 0; n <= H; ++n) {
                        all[n] = n;
                    }
                    std::optional<schedule_checkpoints> sch;
                    if (c.checkpoints == "schedule") {
                        sch = detail::beta_checkpoints(w.beta[i], w.beta[j]);
                    }
                    const auto full = distributional_statistics(traces[i], traces[j], all, grid, delta, sch, dopt);
                    pj["distributional_full"] = detail::densities_json(full);
                    out.files.push_back({"density_full_" + tag + ".csv", detail::density_csv(full, c.density_stride)});
                }
                pj["cross_check"] = to_string(cc);
                pairs.push_back(pj);
                out.files.push_back({"distance_" + tag + ".csv", detail::distance_csv(ly.stats)});
                if (dref != nullptr) {
                    out.files.push_back({"density_" + tag + ".csv", detail::density_csv(*dref, c.density_stride)});
                }
            }
        }
        json tj{{"theorem", theorem}, {"horizon", H}, {"window", c.window}, {"pairs", pairs}};
        if (theorem == "3.1") {
            tj["gamma_blocks"] = blocks;
        } else {
            tj["levels"] = c.levels;
        }
        theorems.push_back(tj);
    }
    const std::string overall = inconsistent > 0 ? "inconsistent" : consistent > 0 ? "consistent" : "inconclusive";
    out.section = json{{"delta", delta},
                       {"epsilon_grid", grid},
                       {"theorems", theorems},
                       {"liyorke_evidence", ly_any},
                       {"distributional_evidence", dist_any},
                       {"cross_check",
                        json{{"verdict", overall},
                             {"consistent", consistent},
                             {"inconsistent", inconsistent},
                             {"inconclusive", inconclusive}}}};
    return out;
}

[[nodiscard]] inline json config_echo(const run_config& c) { return serialize_config(c); }

[[nodiscard]] inline json make_report(const run_config& c)
{
    return json{{"schema", report_schema}, {"config", config_echo(c)}};
}

// Writes report.json and the CSV artifacts; writes happen only here, after
// every computation has finished.
inline void write_outputs(const std::string& dir, const std::string& report_name, const json& report,
                          const std::vector<artifact>& files)
{
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream os(std::filesystem::path(dir) / name, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw config_error(dir, "cannot write " + name);
        }
        os << content;
    };
    write(report_name, report.dump(2) + "\n");
    for (const auto& f : files) {
        write(f.name, f.content);
    }
}

} // namespace ndschaos

// Command-line driver: verify, construct, stats and report subcommands.

#include "ndschaos/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct shared_options {
    std::string config;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> levels;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> induced;
    std::optional<std::string> checkpoints;
    std::optional<std::string> theorem;
    bool strict_separation = false;
    bool force = false;
};

void add_shared(CLI::App& app, shared_options& o)
{
    app.add_option("--config", o.config, "TOML run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--horizon", o.horizon, "index horizon for verification and statistics");
    app.add_option("--depth", o.depth, "cylinder depth of witness points and orbit shadows");
    app.add_option("--levels", o.levels, "levels of the distributional witness schedule");
    app.add_option("--seed", o.seed, "seed of a uniform parameter sequence");
    app.add_option("--out-dir", o.out_dir, "directory for report.json and CSV files");
    app.add_option("--induced", o.induced, "run on the induced system k_n = a n + b, e.g. 2n or 2n+1");
    app.add_option("--checkpoints", o.checkpoints, "schedule | all")->check(CLI::IsMember({"schedule", "all"}));
    app.add_option("--theorem", o.theorem, "3.1 | 4.2")->check(CLI::IsMember({"3.1", "4.2"}));
    app.add_flag("--strict-separation", o.strict_separation, "require positive distance between sets");
    app.add_flag("--force", o.force, "construct even when required hypotheses fail");
}

ndschaos::run_config apply(const shared_options& o)
{
    auto c = ndschaos::load_config(o.config);
    if (o.horizon) {
        c.horizon = *o.horizon;
        c.stats_horizon = *o.horizon;
    }
    if (o.depth) {
        c.witness_depth = *o.depth;
        c.window = *o.depth;
    }
    if (o.levels) {
        c.levels = *o.levels;
    }
    if (o.seed) {
        c.parameters.seed = *o.seed;
    }
    if (o.out_dir) {
        c.out_dir = *o.out_dir;
    }
    if (o.induced) {
        c.induced = ndschaos::parse_induced_expression(*o.induced);
    }
    if (o.checkpoints) {
        c.checkpoints = *o.checkpoints;
    }
    if (o.theorem) {
        c.theorems = {*o.theorem};
    }
    if (o.strict_separation) {
        c.strict_separation = true;
    }
    ndschaos::validate(c);
    return c;
}

int run(const std::string& command, const shared_options& o)
{
    using namespace ndschaos;
    const auto cfg = apply(o);
    const auto ctx = make_context(cfg);
    auto report = make_report(ctx.cfg);
    std::vector<artifact> files;
    int status = 0;

    auto verify = [&] {
        auto v = run_verify(ctx);
        report["verification"] = v.section;
        files.insert(files.end(), v.files.begin(), v.files.end());
        if (!v.passed) {
            status = 1;
        }
        return v.passed;
    };

    if (command == "verify") {
        verify();
    } else if (command == "construct") {
        if (!verify() && !o.force) {
            std::cerr << "required hypotheses failed; rerun with --force to construct anyway\n";
        } else {
            json constructions = json::array();
            for (const auto& t : ctx.cfg.theorems) {
                auto k = run_construct(ctx, t, ctx.cfg.levels);
                constructions.push_back(k.section);
            }
            report["construction"] = constructions;
        }
    } else {
        // stats and report both run the full pipeline.
        const bool ok = verify();
        if (ok || o.force) {
            json constructions = json::array();
            for (const auto& t : ctx.cfg.theorems) {
                constructions.push_back(run_construct(ctx, t, ctx.cfg.levels).section);
            }
            report["construction"] = constructions;
            auto s = run_stats(ctx);
            report["statistics"] = s.section;
            files.insert(files.end(), s.files.begin(), s.files.end());
        }
    }
    write_outputs(ctx.cfg.out_dir, command == "report" ? "report.json" : command + ".json", report, files);
    std::cout << command << ": " << (status == 0 ? "pass" : "hypotheses failed") << " (" << ctx.cfg.out_dir
              << ")\n";
    return status;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Chaos verification toolkit for non-autonomous discrete systems"};
    app.require_subcommand(1);
    shared_options opts;
    std::string command;
    for (const char* name : {"verify", "construct", "stats", "report"}) {
        auto* sub = app.add_subcommand(name);
        add_shared(*sub, opts);
        sub->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return run(command, opts);
    } catch (const ndschaos::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.classification());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

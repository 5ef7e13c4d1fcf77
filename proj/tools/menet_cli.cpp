#include <cstdio>
#include <exception>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "menet/reports.hpp"

using namespace menet;

namespace {

constexpr const char* kVersion = "0.1.0";

void print_summary(const ExperimentArtifacts& art) {
    const ComparisonReport& r = art.report;
    for (const auto& run : r.runs)
        std::printf("day-ahead (%s): total=%.4f peak-valley=%.2f kW "
                    "curtailed=%.2f kWh\n",
                    run.dr_enabled ? "DR on" : "DR off", run.costs.total,
                    run.peak_valley.difference, run.curtailment_kwh);
    if (r.has_comparison)
        std::printf("peak-valley reduction with DR: %.2f%%\n",
                    r.peak_valley_reduction_pct);
    if (r.has_deviation) {
        std::printf("deviation cost: strategy1=%.4f (wind %.4f, pv %.4f) "
                    "strategy2=%.4f\n",
                    r.strategy1.total(), r.strategy1.wind_cost,
                    r.strategy1.pv_cost, r.strategy2.total());
        std::printf("intra-day adjustment cost: %.4f, emergency events: %d\n",
                    r.adjustment_cost, r.emergency_events);
    }
}

void error_json(const char* stage, const std::string& msg, int code) {
    std::fprintf(stderr,
                 "{\"error\": {\"stage\": \"%s\", \"message\": \"%s\", "
                 "\"exit_code\": %d}}\n",
                 stage, msg.c_str(), code);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-stage micro-energy-network scheduling pipeline"};
    app.require_subcommand(1);

    std::string scenario, out = "out", strategy = "all";
    uint64_t seed = 0;
    bool no_dr = false;

    std::vector<CLI::Option*> seed_opts;
    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--scenario", scenario, "scenario JSON file")
            ->required();
        seed_opts.push_back(sub->add_option(
            "--seed", seed, "realization seed (default: scenario seed)"));
        sub->add_flag("--no-dr", no_dr, "operate without demand response");
        if (with_out) sub->add_option("--out", out, "output directory");
        return sub;
    };

    CLI::App* c_validate = app.add_subcommand("validate", "lint a scenario file");
    c_validate->add_option("--scenario", scenario, "scenario JSON file")
        ->required();
    CLI::App* c_da = add_common(
        app.add_subcommand("day-ahead", "day-ahead schedule only"), true);
    CLI::App* c_roll = add_common(
        app.add_subcommand("roll", "day-ahead plus rolling execution"), true);
    CLI::App* c_run = add_common(
        app.add_subcommand("run", "full scenario/strategy matrix"), true);
    c_run->add_option("--strategy", strategy,
                      "all | day-ahead-only (skip rolling)")
        ->check(CLI::IsMember({"all", "day-ahead-only"}));
    CLI::App* c_plot = add_common(
        app.add_subcommand("plot-data", "figure CSVs only"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_validate->parsed()) {
            ScenarioConfig cfg = load_scenario(scenario);
            std::printf("scenario OK, hash %s\n", scenario_hash(cfg).c_str());
            return 0;
        }

        RunManifest mf;
        mf.scenario_path = scenario;
        mf.dr_enabled = !no_dr;
        mf.tool_version = kVersion;
        mf.out_dir = out;
        bool seed_given = false;
        for (const CLI::Option* o : seed_opts) seed_given |= o->count() > 0;
        {
            ScenarioConfig cfg = load_scenario(scenario);  // early config check
            mf.seed = seed_given ? seed : cfg.seed;
        }
        if (c_da->parsed()) mf.strategy = "day-ahead-only";
        if (c_roll->parsed()) mf.strategy = "all";
        if (c_run->parsed()) mf.strategy = strategy;

        std::filesystem::create_directories(out);
        ExperimentArtifacts art = run_experiment(mf);
        write_text_file(out + "/report.json",
                        art.report.to_json(art.manifest.run_id()));
        emit_traces(art, out);
        emit_plot_data(art, out);
        if (!c_plot->parsed()) print_summary(art);
        std::printf("artifacts written to %s\n", out.c_str());
        return 0;
    } catch (const InfeasibleError& e) {
        error_json("solve", e.what(), 3);
        return 3;
    } catch (const std::invalid_argument& e) {
        error_json("config", e.what(), 2);
        return 2;
    } catch (const std::exception& e) {
        error_json("internal", e.what(), 4);
        return 4;
    }
}

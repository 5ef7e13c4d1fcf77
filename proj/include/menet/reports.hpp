#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "menet/day_ahead.hpp"
#include "menet/intraday.hpp"
#include "menet/scenario.hpp"

namespace menet {

// A day-ahead stage failed; carries the elastic diagnosis.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything needed to reproduce a run. Written to manifest.json before
// any solve starts; every CSV row carries the derived run id.
struct RunManifest {
    std::string scenario_path;
    uint64_t seed = 0;
    bool dr_enabled = true;        // DR setting of the operating plan
    std::string strategy = "all";  // "all" or "day-ahead-only"
    std::string out_dir;
    std::string tool_version = "0.1.0";
    std::string config_hash;  // filled when the scenario is loaded

    std::string run_id() const;  // config hash + seed
    std::string to_json() const;
};

struct RunCosts {
    bool dr_enabled = false;
    CostBreakdown costs;
    PeakValley peak_valley;
    double curtailment_kwh = 0.0;
    double renewable_used_kwh = 0.0;
};

// All numbers recomputed from decoded primal traces, never copied from a
// solver objective.
struct ComparisonReport {
    std::vector<RunCosts> runs;  // scenario 1 (no DR), scenario 2 (DR)
    double peak_valley_reduction_pct = 0.0;  // scenario 2 vs 1
    bool has_comparison = false;
    DeviationReport strategy1, strategy2;
    bool has_deviation = false;
    double adjustment_cost = 0.0;
    int emergency_events = 0;

    std::string to_json(const std::string& run_id) const;
};

struct ExperimentArtifacts {
    ScenarioConfig cfg;
    RunManifest manifest;
    std::vector<StationEnvelope> envelopes;          // day-ahead grid
    std::vector<DayAheadResult> day_ahead;           // parallel to report.runs
    const DispatchPlan* operating_plan = nullptr;    // into day_ahead
    IntradayInputs inputs;                           // for the operating plan
    ExecutionTrace trace;                            // rolling execution
    Profile pv_forecast_da, wt_forecast_da;          // plant totals, kW
    Profile pv_realized_da, wt_realized_da;
    bool rolled = false;
    ComparisonReport report;
};

// Full experiment per the manifest: day-ahead matrix, one seeded
// realization, deviation assessment for both commitment strategies and the
// rolling re-dispatch. Writes manifest.json first when out_dir is set.
ExperimentArtifacts run_experiment(RunManifest manifest);

// Plot-ready CSVs (RFC 4180): forecasts, station envelopes, balance
// stacks, plan-vs-output and prediction-vs-actual differences.
void emit_plot_data(const ExperimentArtifacts& art, const std::string& out_dir);

// Per-step dispatch traces; every report number re-derives from these.
void emit_traces(const ExperimentArtifacts& art, const std::string& out_dir);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace menet

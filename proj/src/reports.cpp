#include "menet/reports.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "menet/forecast.hpp"

namespace menet {

using nlohmann::json;

namespace {

std::string fmt(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

// Minimal RFC 4180 writer; fields here never contain commas or quotes.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : f_(path, std::ios::binary) {
        if (!f_) throw std::runtime_error("cannot open " + path);
        line(header);
    }
    void row(const std::vector<std::string>& cells) { line(cells); }

private:
    void line(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) f_ << ',';
            f_ << cells[i];
        }
        f_ << "\r\n";
    }
    std::ofstream f_;
};

json costs_json(const CostBreakdown& c) {
    return {{"c_g", c.c_g},       {"c_pollu", c.c_pollu},
            {"c_gird", c.c_gird}, {"c_ess", c.c_ess},
            {"c_evc", c.c_evc},   {"c_dr", c.c_dr},
            {"c_cur", c.c_cur},   {"total", c.total}};
}

json deviation_json(const DeviationReport& d) {
    return {{"wind_cost", d.wind_cost},
            {"pv_cost", d.pv_cost},
            {"total", d.total()}};
}

RunCosts summarize_run(const DispatchPlan& p, bool dr_enabled) {
    RunCosts rc;
    rc.dr_enabled = dr_enabled;
    // recomputed from primal values; throws if the parts disagree
    rc.costs = p.costs;
    rc.peak_valley = peak_valley_metric(p.grid_exchange());
    rc.curtailment_kwh = p.p_curtailed.energy();
    rc.renewable_used_kwh = p.p_pv_used.energy() + p.p_wt_used.energy();
    return rc;
}

}  // namespace

std::string RunManifest::run_id() const {
    return config_hash + "-" + std::to_string(seed);
}

std::string RunManifest::to_json() const {
    json j = {{"scenario_path", scenario_path},
              {"seed", seed},
              {"dr_enabled", dr_enabled},
              {"strategy", strategy},
              {"out_dir", out_dir},
              {"tool_version", tool_version},
              {"config_hash", config_hash},
              {"run_id", run_id()}};
    return j.dump(2) + "\n";
}

std::string ComparisonReport::to_json(const std::string& run_id) const {
    json j;
    j["run_id"] = run_id;
    j["runs"] = json::array();
    for (const auto& r : runs)
        j["runs"].push_back({{"dr_enabled", r.dr_enabled},
                             {"costs", costs_json(r.costs)},
                             {"peak_kw", r.peak_valley.peak},
                             {"valley_kw", r.peak_valley.valley},
                             {"peak_valley_kw", r.peak_valley.difference},
                             {"curtailment_kwh", r.curtailment_kwh},
                             {"renewable_used_kwh", r.renewable_used_kwh}});
    if (has_comparison)
        j["comparison"] = {{"peak_valley_reduction_pct",
                            peak_valley_reduction_pct}};
    if (has_deviation) {
        j["deviation"] = {{"strategy1", deviation_json(strategy1)},
                          {"strategy2", deviation_json(strategy2)}};
        j["intraday"] = {{"adjustment_cost", adjustment_cost},
                         {"emergency_events", emergency_events}};
    }
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << text;
}

ExperimentArtifacts run_experiment(RunManifest manifest) {
    ExperimentArtifacts art;
    art.cfg = load_scenario(manifest.scenario_path);
    manifest.config_hash = scenario_hash(art.cfg);
    art.manifest = manifest;
    if (!manifest.out_dir.empty())
        write_text_file(manifest.out_dir + "/manifest.json",
                        manifest.to_json());

    const ScenarioConfig& cfg = art.cfg;
    std::vector<std::vector<EvSession>> fleets;
    for (const auto& st : cfg.stations) {
        fleets.push_back(cfg.fleet_for(st, cfg.day_ahead_grid));
        art.envelopes.push_back(
            aggregate(fleets.back(), cfg.day_ahead_grid, st.id));
    }

    const bool matrix = manifest.strategy != "day-ahead-only";
    auto stage = [&](bool dr) {
        return solve_day_ahead(cfg, art.envelopes, dr, fleets);
    };
    if (matrix) {
        // scenario 1 (no DR) and scenario 2 (DR) are independent solves
        auto f1 = std::async(std::launch::async, stage, false);
        auto f2 = std::async(std::launch::async, stage, true);
        art.day_ahead.push_back(f1.get());
        art.day_ahead.push_back(f2.get());
    } else {
        art.day_ahead.push_back(stage(manifest.dr_enabled));
    }
    for (const auto& r : art.day_ahead)
        if (r.status != SolveStatus::Optimal)
            throw InfeasibleError("day-ahead infeasible: " + r.diagnosis);
    for (size_t i = 0; i < art.day_ahead.size(); ++i)
        art.report.runs.push_back(summarize_run(
            art.day_ahead[i].plan, matrix ? i == 1 : manifest.dr_enabled));

    art.pv_forecast_da =
        renewable_available(cfg.pv, cfg.pv.unit_profile.forecast);
    art.wt_forecast_da =
        renewable_available(cfg.wt, cfg.wt.unit_profile.forecast);
    art.pv_realized_da = renewable_available(
        cfg.pv, sample_realization(cfg.pv.unit_profile, manifest.seed));
    art.wt_realized_da = renewable_available(
        cfg.wt, sample_realization(cfg.wt.unit_profile, manifest.seed));

    if (matrix) {
        const auto& d1 = art.report.runs[0].peak_valley.difference;
        const auto& d2 = art.report.runs[1].peak_valley.difference;
        art.report.peak_valley_reduction_pct =
            d1 > 0 ? (d1 - d2) / d1 * 100.0 : 0.0;
        art.report.has_comparison = true;

        art.operating_plan =
            &art.day_ahead[manifest.dr_enabled ? 1 : 0].plan;
        art.inputs = prepare_intraday(cfg, *art.operating_plan);
        RollingConfig rc = RollingConfig::from_scenario(cfg);
        art.trace = roll(rc, cfg, *art.operating_plan, manifest.seed);
        art.rolled = true;

        // strategy 1 commits the day-ahead renewable schedule verbatim;
        // strategy 2 commits what the rolling re-dispatch executed
        art.report.strategy1 = assess_deviation(
            art.inputs.reference.p_pv_used, art.inputs.reference.p_wt_used,
            art.trace.pv_avail_realized, art.trace.wt_avail_realized,
            cfg.penalty_rate);
        art.report.strategy2 = assess_deviation(
            art.trace.executed.p_pv_used, art.trace.executed.p_wt_used,
            art.trace.pv_avail_realized, art.trace.wt_avail_realized,
            cfg.penalty_rate);
        art.report.has_deviation = true;
        art.report.adjustment_cost = art.trace.total_adjustment_cost;
        art.report.emergency_events =
            static_cast<int>(art.trace.emergency.size());
    }
    return art;
}

namespace {

void emit_plan_csv(const std::string& path, const std::string& run_id,
                   const DispatchPlan& p) {
    CsvWriter w(path, {"step",      "p_gt",      "gt_on",    "p_buy",
                       "p_sell",    "p_ess_ch",  "p_ess_dis", "ess_soc",
                       "p_hp",      "q_hp",      "h_hs_ch",  "h_hs_dis",
                       "hs_soc",    "p_st_ch",   "p_st_dis", "p_pv_used",
                       "p_wt_used", "p_curtailed", "reserve", "run_id"});
    for (int t = 0; t < p.grid.n_steps; ++t) {
        double st_ch = 0.0, st_dis = 0.0;
        for (const auto& st : p.stations) {
            st_ch += st.schedule.p_ch[t];
            st_dis += st.schedule.p_dis[t];
        }
        w.row({std::to_string(t), fmt(p.p_gt[t]),
               std::to_string(p.gt_on[static_cast<size_t>(t)]),
               fmt(p.p_buy[t]), fmt(p.p_sell[t]), fmt(p.p_ess_ch[t]),
               fmt(p.p_ess_dis[t]), fmt(p.ess_soc[t]), fmt(p.p_hp[t]),
               fmt(p.q_hp[t]), fmt(p.h_hs_ch[t]), fmt(p.h_hs_dis[t]),
               fmt(p.hs_soc[t]), fmt(st_ch), fmt(st_dis), fmt(p.p_pv_used[t]),
               fmt(p.p_wt_used[t]), fmt(p.p_curtailed[t]), fmt(p.reserve[t]),
               run_id});
    }
}

void emit_balance_csvs(const std::string& out_dir, const std::string& run_id,
                       const ScenarioConfig& cfg, const DispatchPlan& p,
                       int scenario_no) {
    auto [le, lh] = effective_loads(cfg.load_e, cfg.load_h, p.dr);
    std::string suffix = "_scenario" + std::to_string(scenario_no) + ".csv";
    CsvWriter we(out_dir + "/balance_e" + suffix,
                 {"step", "p_gt", "p_buy", "p_pv_used", "p_wt_used",
                  "p_ess_dis", "p_sell", "p_ess_ch", "p_st_net", "p_hp",
                  "load_e_eff", "reserve", "run_id"});
    CsvWriter wh(out_dir + "/balance_h" + suffix,
                 {"step", "q_hp", "h_hs_dis", "h_hs_ch", "load_h_eff",
                  "run_id"});
    for (int t = 0; t < p.grid.n_steps; ++t) {
        double st_net = 0.0;
        for (const auto& st : p.stations)
            st_net += st.schedule.p_ch[t] - st.schedule.p_dis[t];
        we.row({std::to_string(t), fmt(p.p_gt[t]), fmt(p.p_buy[t]),
                fmt(p.p_pv_used[t]), fmt(p.p_wt_used[t]), fmt(p.p_ess_dis[t]),
                fmt(p.p_sell[t]), fmt(p.p_ess_ch[t]), fmt(st_net),
                fmt(p.p_hp[t]), fmt(le[t]), fmt(p.reserve[t]), run_id});
        wh.row({std::to_string(t), fmt(p.q_hp[t]), fmt(p.h_hs_dis[t]),
                fmt(p.h_hs_ch[t]), fmt(lh[t]), run_id});
    }
}

}  // namespace

void emit_plot_data(const ExperimentArtifacts& art,
                    const std::string& out_dir) {
    const std::string id = art.manifest.run_id();
    const ScenarioConfig& cfg = art.cfg;

    {
        CsvWriter w(out_dir + "/forecast.csv",
                    {"step", "pv_forecast_kw", "pv_realized_kw",
                     "wt_forecast_kw", "wt_realized_kw", "run_id"});
        for (int t = 0; t < cfg.day_ahead_grid.n_steps; ++t)
            w.row({std::to_string(t), fmt(art.pv_forecast_da[t]),
                   fmt(art.pv_realized_da[t]), fmt(art.wt_forecast_da[t]),
                   fmt(art.wt_realized_da[t]), id});
    }
    {
        CsvWriter w(out_dir + "/envelopes.csv",
                    {"station_id", "step", "p_ch_max_kw", "p_dis_max_kw",
                     "s_min_kwh", "s_max_kwh", "delta_s_kwh", "run_id"});
        for (const auto& e : art.envelopes)
            for (int t = 0; t < e.grid.n_steps; ++t)
                w.row({e.station_id, std::to_string(t), fmt(e.p_ch_max[t]),
                       fmt(e.p_dis_max[t]), fmt(e.s_min[t]), fmt(e.s_max[t]),
                       fmt(e.delta_s[t]), id});
    }
    for (size_t i = 0; i < art.day_ahead.size(); ++i)
        emit_balance_csvs(out_dir, id, cfg, art.day_ahead[i].plan,
                          static_cast<int>(i) + 1);

    if (!art.rolled) return;
    const DispatchPlan& ref = art.inputs.reference;
    const DispatchPlan& ex = art.trace.executed;
    {
        CsvWriter w(out_dir + "/plan_vs_output.csv",
                    {"step", "ref_p_gt", "exec_p_gt", "ref_net_grid",
                     "exec_net_grid", "ref_ess_net", "exec_ess_net",
                     "ref_pv_used", "exec_pv_used", "ref_wt_used",
                     "exec_wt_used", "run_id"});
        for (int t = 0; t < ex.grid.n_steps; ++t)
            w.row({std::to_string(t), fmt(ref.p_gt[t]), fmt(ex.p_gt[t]),
                   fmt(ref.p_buy[t] - ref.p_sell[t]),
                   fmt(ex.p_buy[t] - ex.p_sell[t]),
                   fmt(ref.p_ess_ch[t] - ref.p_ess_dis[t]),
                   fmt(ex.p_ess_ch[t] - ex.p_ess_dis[t]),
                   fmt(ref.p_pv_used[t]), fmt(ex.p_pv_used[t]),
                   fmt(ref.p_wt_used[t]), fmt(ex.p_wt_used[t]), id});
    }
    {
        // realized availability minus commitment; negatives are shortages
        CsvWriter w(out_dir + "/deviation.csv",
                    {"step", "pv_diff_s1", "wt_diff_s1", "pv_diff_s2",
                     "wt_diff_s2", "run_id"});
        for (int t = 0; t < ex.grid.n_steps; ++t)
            w.row({std::to_string(t),
                   fmt(art.trace.pv_avail_realized[t] - ref.p_pv_used[t]),
                   fmt(art.trace.wt_avail_realized[t] - ref.p_wt_used[t]),
                   fmt(art.trace.pv_avail_realized[t] - ex.p_pv_used[t]),
                   fmt(art.trace.wt_avail_realized[t] - ex.p_wt_used[t]),
                   id});
    }
}

void emit_traces(const ExperimentArtifacts& art, const std::string& out_dir) {
    const std::string id = art.manifest.run_id();
    for (size_t i = 0; i < art.day_ahead.size(); ++i)
        emit_plan_csv(out_dir + "/dayahead_scenario" +
                          std::to_string(i + 1) + ".csv",
                      id, art.day_ahead[i].plan);
    if (art.rolled)
        emit_plan_csv(out_dir + "/intraday_executed.csv", id,
                      art.trace.executed);
}

}  // namespace menet

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "menet/day_ahead.hpp"
#include "menet/forecast.hpp"
#include "menet/milp.hpp"
#include "menet/scenario.hpp"
#include "menet/station.hpp"

namespace menet {

struct RollingConfig {
    int window_steps = 16;   // 4 h at 15 min
    int execute_steps = 1;
    double sigma_ess = 0.0;  // currency/kWh adjustment coefficients
    double sigma_gt = 0.0;
    double sigma_gird = 0.0;
    double c_evc = 0.0;
    double sigma_hs = 0.0;
    double sigma_hp = 0.0;

    static RollingConfig from_scenario(const ScenarioConfig& cfg);
    void validate() const;
};

struct SystemState {
    int step = 0;            // next intra-day step to execute
    double ess_soc = 0.0;    // kWh, after step-1
    std::vector<double> station_soc;  // kWh per station
    double hs_soc = 0.0;     // kWh thermal
    bool gt_on = false;      // commitment at step-1
    double p_gt_prev = 0.0;  // kW at step-1
};

struct DeviationEntry {
    int step = 0;
    std::string source;
    double shortage_kw = 0.0;
};

struct WindowCost {
    double c_g = 0.0;  // electric-side adjustment
    double c_h = 0.0;  // heat-side adjustment
    double total() const { return c_g + c_h; }
};

struct ExecutionTrace {
    TimeGrid grid;           // intra-day
    DispatchPlan executed;   // executed setpoints, same schema as the plan
    Profile pv_avail_realized, wt_avail_realized;  // kW
    std::vector<WindowCost> window_costs;          // one per window solved
    double total_adjustment_cost = 0.0;            // executed-step deviations
    std::vector<DeviationEntry> emergency;         // emergency purchases
};

// Everything a window solve needs besides the state: the resampled
// day-ahead reference and the intra-day station envelopes.
struct IntradayInputs {
    TimeGrid grid;
    std::vector<StationEnvelope> envelopes;  // intra-day grid
    DispatchPlan reference;                  // plan resampled to intra-day
    Profile load_e_eff, load_h_eff;          // DR-modified loads, intra-day
    Profile reserve;                         // inherited day-ahead margin
    std::vector<int> gt_commit;              // u per intra-day step
};

// Day-ahead hourly sessions expanded to the intra-day lattice (whole-hour
// windows), so both stages dispatch identical physical sessions.
std::vector<EvSession> expand_sessions(const std::vector<EvSession>& fleet,
                                       const TimeGrid& da_grid,
                                       const TimeGrid& id_grid);

IntradayInputs prepare_intraday(const ScenarioConfig& cfg,
                                const DispatchPlan& plan);

// Window model variable indexes (offset k = t - window_start).
struct WindowVars {
    int w0 = 0, len = 0;
    std::vector<int> p_gt, p_buy, p_sell;
    std::vector<int> ess_ch, ess_dis, ess_soc;
    std::vector<int> q_hp, hs_ch, hs_dis, hs_soc;
    std::vector<int> pv_used, wt_used;
    std::vector<std::vector<int>> st_ch, st_dis, st_soc;
    std::vector<int> emergency;  // empty unless relax_tie
};

MilpModel build_window_model(const RollingConfig& rc,
                             const ScenarioConfig& cfg,
                             const IntradayInputs& in,
                             const SystemState& state,
                             const Profile& fresh_pv_avail,
                             const Profile& fresh_wt_avail, WindowVars& v,
                             bool relax_tie = false);

ExecutionTrace roll(const RollingConfig& rc, const ScenarioConfig& cfg,
                    const DispatchPlan& plan, uint64_t realization_seed);

struct DeviationReport {
    double wind_cost = 0.0;
    double pv_cost = 0.0;
    Profile wind_shortage, pv_shortage;  // kW per step

    double total() const { return wind_cost + pv_cost; }
};

// Negative-deviation assessment: shortage(t) = max(0, committed - realized),
// billed at penalty_rate per kWh.
DeviationReport assess_deviation(const Profile& committed_pv,
                                 const Profile& committed_wt,
                                 const Profile& realized_pv_avail,
                                 const Profile& realized_wt_avail,
                                 double penalty_rate);

// Hourly ground-truth availability for one seeded realization, resampled
// piecewise-constant to the intra-day grid.
std::pair<Profile, Profile> realize_availability(const ScenarioConfig& cfg,
                                                 uint64_t realization_seed);

}  // namespace menet

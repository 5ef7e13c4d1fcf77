#pragma once

#include <string>
#include <vector>

#include "menet/dr.hpp"
#include "menet/milp.hpp"
#include "menet/scenario.hpp"
#include "menet/station.hpp"
#include "menet/timegrid.hpp"

namespace menet {

struct CostBreakdown {
    double c_g = 0.0;      // fuel + start/stop
    double c_pollu = 0.0;  // emissions
    double c_gird = 0.0;   // tie-line energy bill (buy minus sell)
    double c_ess = 0.0;    // battery throughput
    double c_evc = 0.0;    // station throughput
    double c_dr = 0.0;     // curtailment compensation
    double c_cur = 0.0;    // renewable curtailment
    double total = 0.0;

    double sum_parts() const {
        return c_g + c_pollu + c_gird + c_ess + c_evc + c_dr + c_cur;
    }
};

struct StationDispatch {
    std::string station_id;
    StationSchedule schedule;
};

struct DispatchPlan {
    TimeGrid grid;
    Profile p_gt;
    std::vector<int> gt_on;
    std::vector<int> gt_start, gt_stop;
    Profile p_buy, p_sell;
    Profile p_ess_ch, p_ess_dis, ess_soc;  // soc in kWh
    std::vector<StationDispatch> stations;
    Profile p_hp;  // electric draw
    Profile q_hp;  // thermal output
    Profile h_hs_ch, h_hs_dis, hs_soc;
    Profile p_pv_used, p_wt_used, p_curtailed;
    Profile reserve;  // scheduled supply margin, kW
    DrDecision dr;
    CostBreakdown costs;

    Profile grid_exchange() const;  // p_buy - p_sell
};

// Variable indexes of the built model, so callers can decode or pin values.
struct DayAheadVars {
    std::vector<int> p_gt, u, su, sd;
    std::vector<int> p_buy, p_sell;
    std::vector<int> ess_ch, ess_dis, ess_soc;
    std::vector<int> q_hp, hs_ch, hs_dis, hs_soc;
    std::vector<int> pv_used, wt_used;
    std::vector<int> shift_in, shift_out, cur_e, cur_h;
    std::vector<std::vector<int>> st_ch, st_dis, st_soc;
};

// Deterministic per-step reserve requirement: quantile(eta) * sigma_total,
// sigma_total(t) = sqrt(sigma_pv(t)^2 + sigma_wt(t)^2) over all units.
Profile reserve_requirement(const ScenarioConfig& cfg);

MilpModel build_day_ahead(const ScenarioConfig& cfg,
                          const std::vector<StationEnvelope>& envelopes,
                          bool dr_enabled, DayAheadVars& vars);

struct DayAheadResult {
    SolveStatus status = SolveStatus::Infeasible;
    DispatchPlan plan;
    std::string diagnosis;    // filled on infeasibility
    int repair_iterations = 0;  // envelope tightenings applied
};

// Solve + decode; on infeasibility runs an elastic diagnostic solve and
// names the first violated balance step. When fleets are supplied, the
// aggregate station schedules are checked for decomposability and the
// envelope is tightened by the detected gap (at most 3 iterations).
DayAheadResult solve_day_ahead(
    const ScenarioConfig& cfg, std::vector<StationEnvelope> envelopes,
    bool dr_enabled,
    const std::vector<std::vector<EvSession>>& fleets = {});

struct PeakValley {
    double peak = 0.0;
    double valley = 0.0;
    double difference = 0.0;
};

PeakValley peak_valley_metric(const Profile& grid_exchange);

// Recomputes every cost term from primal values; throws when the parts do
// not add up or disagree with the solver objective beyond 1e-6.
CostBreakdown recompute_costs(const ScenarioConfig& cfg, const DispatchPlan& p,
                              double solver_objective);

}  // namespace menet

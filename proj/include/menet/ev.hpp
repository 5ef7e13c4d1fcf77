#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "menet/timegrid.hpp"

namespace menet {

// One vehicle's grid-connection episode. SOC values in kWh, powers in kW.
struct EvSession {
    std::string id;
    std::string station_id;
    int t_arrive = 0;
    int t_leave = 0;
    double soc_arrive = 0.0;
    double soc_leave = 0.0;
    double soc_min = 0.0;
    double soc_max = 0.0;
    double p_ch_max = 0.0;
    double p_dis_max = 0.0;
    double eta_ch = 1.0;
    double eta_dis = 1.0;
    double eta_ref = 1.0;

    void validate(const TimeGrid& grid) const;
};

// Presence indicator: one contiguous run of 1s over [t_arrive, t_leave].
struct PresenceSeries {
    std::vector<uint8_t> d;
    bool at(int t) const {
        return t >= 0 && t < static_cast<int>(d.size()) && d[static_cast<size_t>(t)];
    }
};

PresenceSeries presence(const EvSession& s, const TimeGrid& grid);

// SOC recursion over one step during the grid-connected period.
double soc_step(const EvSession& s, double soc_prev, double p_ch, double p_dis,
                double dt_hours);

// Boundary energy injections: +soc_arrive at the arrival step,
// -soc_leave at the step after departure (dropped if outside the grid).
Profile boundary_injections(const EvSession& s, const TimeGrid& grid);

// Greedy max-rate charge from soc_arrive; true when soc_leave is reachable
// within the stay while respecting soc_max.
bool soc_target_reachable(const EvSession& s, const TimeGrid& grid);

// Distribution parameters for synthetic fleets. Arrivals draw from two
// clamped-normal cohorts (morning commuters, evening chargers).
struct FleetSpec {
    int n_evs = 0;
    double arrive_hour_morning = 8.0;
    double arrive_hour_evening = 18.0;
    double arrive_spread_hours = 1.5;
    double morning_fraction = 0.5;
    double stay_hours_min = 6.0;
    double stay_hours_max = 12.0;
    double soc_arrive_frac_min = 0.2;
    double soc_arrive_frac_max = 0.5;
    double soc_leave_frac_min = 0.8;
    double soc_leave_frac_max = 0.95;
    double soc_max_min_kwh = 40.0;
    double soc_max_max_kwh = 80.0;
    double p_ch_max = 7.0;
    double p_dis_max = 7.0;
    double eta_ch = 0.95;
    double eta_dis = 0.95;
    double eta_ref = 1.0;
    uint64_t seed = 0;
};

// Deterministic synthetic fleet; infeasible draws are repaired, never
// rejected, so the session count is stable across parameter tweaks.
std::vector<EvSession> synthesize_fleet(const FleetSpec& spec,
                                        const TimeGrid& grid,
                                        const std::string& station_id);

}  // namespace menet

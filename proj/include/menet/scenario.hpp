#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "menet/devices.hpp"
#include "menet/dr.hpp"
#include "menet/ev.hpp"
#include "menet/timegrid.hpp"

namespace menet {

struct StationConfig {
    std::string id;
    FleetSpec fleet;
};

// Whole-experiment configuration; one JSON document (see docs/scenario.md).
struct ScenarioConfig {
    int version = 1;
    uint64_t seed = 0;

    TimeGrid day_ahead_grid = TimeGrid::day_ahead();
    TimeGrid intra_day_grid = TimeGrid::intra_day();

    GridTieParams grid_tie;
    GasTurbineParams gas_turbine;
    BatteryParams battery;
    RenewableParams pv;
    RenewableParams wt;
    HeatParams heat;

    std::vector<StationConfig> stations;

    Profile load_e;  // kW, day-ahead grid
    Profile load_h;  // kW thermal, day-ahead grid

    DrParams dr;

    double eta_confidence = 0.95;   // chance-constraint confidence
    double penalty_rate = 0.0;      // currency/kWh renewable shortage
    double c_evc = 0.0;             // currency/kWh station throughput
    double lambda_cur = 0.0;        // currency/kWh renewable curtailment
    double sigma_ess = 0.0;         // intra-day adjustment coefficients
    double sigma_gt = 0.0;
    double da_sigma_frac = 0.10;    // day-ahead forecast error fraction
    double intraday_sigma_frac = 0.03;
    int window_steps = 16;
    int execute_steps = 1;

    void validate() const;

    // Fleets and their Minkowski envelopes on an arbitrary alignable grid.
    std::vector<EvSession> fleet_for(const StationConfig& st,
                                     const TimeGrid& grid) const;
};

ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::string& path);

// FNV-1a content hash of the canonical JSON form, for run manifests.
std::string scenario_hash(const ScenarioConfig& cfg);

}  // namespace menet

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "menet/ev.hpp"
#include "menet/timegrid.hpp"

namespace menet {

// Virtual-storage envelope of a charging station: per-step power caps,
// SOC corridor, and boundary energy injections, summed over sessions.
struct StationEnvelope {
    std::string station_id;
    TimeGrid grid;
    Profile p_ch_max;   // kW
    Profile p_dis_max;  // kW
    Profile s_min;      // kWh
    Profile s_max;      // kWh
    Profile delta_s;    // kWh boundary injections
    double eta_ch = 1.0;
    double eta_dis = 1.0;
    double eta_ref = 1.0;
};

struct StationSchedule {
    Profile p_ch;   // kW
    Profile p_dis;  // kW
    Profile soc;    // kWh
};

struct Violation {
    int step;
    std::string constraint;
    double residual;
};

StationEnvelope aggregate(const std::vector<EvSession>& sessions,
                          const TimeGrid& grid,
                          const std::string& station_id = "");

// Checks power caps, the SOC recursion with boundary injections, and the
// SOC corridor; reports residuals above 1e-6 instead of throwing.
std::vector<Violation> validate_schedule(const StationEnvelope& env,
                                         const StationSchedule& sch);

// SOC trajectory implied by the envelope's recursion for given powers.
Profile implied_soc(const StationEnvelope& env, const Profile& p_ch,
                    const Profile& p_dis);

struct SessionSchedule {
    std::string session_id;
    Profile p_ch;
    Profile p_dis;
};

struct DisaggregationResult {
    bool decomposable = false;
    std::vector<SessionSchedule> per_session;
    // largest per-step shortfall between the aggregate ask and what the
    // physically present sessions can absorb; feeds the repair loop
    double gap_kwh = 0.0;
};

// Feasibility LP over per-session variables with per-step sums pinned to
// the aggregate schedule. The envelope is an outer approximation, so a
// NonDecomposable outcome is expected occasionally.
DisaggregationResult disaggregate(const StationEnvelope& env,
                                  const StationSchedule& sch,
                                  const std::vector<EvSession>& sessions);

}  // namespace menet

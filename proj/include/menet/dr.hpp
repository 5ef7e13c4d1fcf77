#pragma once

#include <utility>
#include <vector>

#include "menet/timegrid.hpp"

namespace menet {

// Price-based shiftable load plus incentive-based compensated curtailment.
struct DrParams {
    double shiftable_fraction_e = 0.0;  // fraction of electric load per step
    Profile curtail_cap_e;              // kW
    Profile curtail_cap_h;              // kW thermal
    double lambda_e = 0.0;              // currency/kWh
    double lambda_h = 0.0;              // currency/kWh
    std::vector<int> peak_steps;        // shift_out allowed here
    std::vector<int> valley_steps;      // shift_in allowed here

    void validate(const TimeGrid& grid) const;
    bool is_peak(int t) const;
    bool is_valley(int t) const;
};

struct DrDecision {
    Profile shift_in;    // kW
    Profile shift_out;   // kW
    Profile curtail_e;   // kW
    Profile curtail_h;   // kW thermal

    static DrDecision zero(const TimeGrid& grid);
};

// Validates the decision against params and base load, then applies it.
// Throws on negative effective load or broken shift balance.
std::pair<Profile, Profile> effective_loads(const Profile& base_e,
                                            const Profile& base_h,
                                            const DrDecision& d);

void validate_decision(const DrDecision& d, const DrParams& p,
                       const Profile& base_e);

double dr_cost(const DrDecision& d, const DrParams& p);

}  // namespace menet

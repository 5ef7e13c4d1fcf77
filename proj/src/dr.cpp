#include "menet/dr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace menet {

void DrParams::validate(const TimeGrid& grid) const {
    if (shiftable_fraction_e < 0 || shiftable_fraction_e > 1)
        throw std::invalid_argument("dr: shiftable fraction outside [0,1]");
    for (double c : curtail_cap_e.values)
        if (c < 0) throw std::invalid_argument("dr: negative electric curtail cap");
    for (double c : curtail_cap_h.values)
        if (c < 0) throw std::invalid_argument("dr: negative heat curtail cap");
    for (int t : peak_steps) {
        if (t < 0 || t >= grid.n_steps)
            throw std::invalid_argument("dr: peak step outside grid");
        if (is_valley(t))
            throw std::invalid_argument("dr: peak and valley step sets overlap");
    }
    for (int t : valley_steps)
        if (t < 0 || t >= grid.n_steps)
            throw std::invalid_argument("dr: valley step outside grid");
}

bool DrParams::is_peak(int t) const {
    return std::find(peak_steps.begin(), peak_steps.end(), t) != peak_steps.end();
}
bool DrParams::is_valley(int t) const {
    return std::find(valley_steps.begin(), valley_steps.end(), t) != valley_steps.end();
}

DrDecision DrDecision::zero(const TimeGrid& grid) {
    DrDecision d;
    d.shift_in = Profile(grid, Unit::kW);
    d.shift_out = Profile(grid, Unit::kW);
    d.curtail_e = Profile(grid, Unit::kW);
    d.curtail_h = Profile(grid, Unit::kW);
    return d;
}

void validate_decision(const DrDecision& d, const DrParams& p,
                       const Profile& base_e) {
    const double tol = 1e-9;
    double in = 0.0, out = 0.0;
    for (int t = 0; t < base_e.size(); ++t) {
        if (d.shift_out[t] < -tol || d.shift_out[t] > p.shiftable_fraction_e * base_e[t] + 1e-6)
            throw std::invalid_argument("dr: shift_out beyond shiftable fraction");
        if (d.curtail_e[t] < -tol || d.curtail_e[t] > p.curtail_cap_e[t] + 1e-6)
            throw std::invalid_argument("dr: curtail_e beyond cap");
        if (d.curtail_h[t] < -tol || d.curtail_h[t] > p.curtail_cap_h[t] + 1e-6)
            throw std::invalid_argument("dr: curtail_h beyond cap");
        in += d.shift_in[t];
        out += d.shift_out[t];
    }
    double dt = base_e.grid.dt_hours();
    if (std::abs(in - out) * dt > 1e-6)
        throw std::invalid_argument("dr: shifted energy not balanced");
}

std::pair<Profile, Profile> effective_loads(const Profile& base_e,
                                            const Profile& base_h,
                                            const DrDecision& d) {
    Profile e(base_e.grid, Unit::kW), h(base_h.grid, Unit::kW);
    for (int t = 0; t < base_e.size(); ++t) {
        e[t] = base_e[t] - d.shift_out[t] + d.shift_in[t] - d.curtail_e[t];
        if (e[t] < -1e-9)
            throw std::invalid_argument("dr: negative effective electric load");
    }
    for (int t = 0; t < base_h.size(); ++t) {
        h[t] = base_h[t] - d.curtail_h[t];
        if (h[t] < -1e-9)
            throw std::invalid_argument("dr: negative effective heat load");
    }
    return {e, h};
}

double dr_cost(const DrDecision& d, const DrParams& p) {
    double dt = d.curtail_e.grid.dt_hours();
    double ce = 0.0, ch = 0.0;
    for (double v : d.curtail_e.values) ce += v;
    for (double v : d.curtail_h.values) ch += v;
    return p.lambda_e * ce * dt + p.lambda_h * ch * dt;
}

}  // namespace menet

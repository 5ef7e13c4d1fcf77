#include "menet/timegrid.hpp"

#include <algorithm>
#include <cmath>

namespace menet {

bool TimeGrid::alignable_with(const TimeGrid& other) const {
    if (step_minutes <= 0 || other.step_minutes <= 0) return false;
    if (start_hour != other.start_hour) return false;
    if (std::abs(horizon_hours() - other.horizon_hours()) > 1e-9) return false;
    int a = step_minutes, b = other.step_minutes;
    return (a % b == 0) || (b % a == 0);
}

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::kW: return "kW";
        case Unit::kWh: return "kWh";
        case Unit::CurrencyPerKwh: return "currency_per_kWh";
        case Unit::Dimensionless: return "dimensionless";
    }
    return "unknown";
}

Unit unit_from_name(const std::string& s) {
    if (s == "kW") return Unit::kW;
    if (s == "kWh") return Unit::kWh;
    if (s == "currency_per_kWh") return Unit::CurrencyPerKwh;
    if (s == "dimensionless") return Unit::Dimensionless;
    throw std::invalid_argument("unknown unit: " + s);
}

Profile::Profile(const TimeGrid& g, Unit u, std::vector<double> v)
    : grid(g), unit(u), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.n_steps)
        throw std::invalid_argument("profile length does not match grid");
}

double Profile::energy() const {
    double e = 0.0;
    for (double v : values) e += v;
    return e * grid.dt_hours();
}

double Profile::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

double Profile::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

Profile resample(const Profile& p, const TimeGrid& target) {
    if (!p.grid.alignable_with(target))
        throw std::invalid_argument("grids are not alignable");
    if (p.grid.step_minutes == target.step_minutes) {
        Profile out = p;
        out.grid = target;
        return out;
    }
    Profile out(target, p.unit);
    if (p.grid.step_minutes % target.step_minutes == 0) {
        // refinement: hold each coarse value over its fine steps
        int k = p.grid.step_minutes / target.step_minutes;
        for (int t = 0; t < target.n_steps; ++t) out[t] = p[t / k];
    } else {
        // coarsening: average fine values (preserves energy of power profiles)
        int k = target.step_minutes / p.grid.step_minutes;
        for (int t = 0; t < target.n_steps; ++t) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += p[t * k + i];
            out[t] = acc / k;
        }
    }
    return out;
}

}  // namespace menet

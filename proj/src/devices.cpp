#include "menet/devices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace menet {

void GridTieParams::validate() const {
    if (p_min > p_max) throw std::invalid_argument("grid tie: p_min > p_max");
    if (price_buy.size() != price_sell.size())
        throw std::invalid_argument("grid tie: price profile length mismatch");
    for (int t = 0; t < price_buy.size(); ++t)
        if (price_sell[t] > price_buy[t] + 1e-12)
            throw std::invalid_argument("grid tie: sell price above buy price");
}

void GasTurbineParams::validate() const {
    if (p_min < 0 || p_min > p_max)
        throw std::invalid_argument("gas turbine: need 0 <= p_min <= p_max");
    if (ramp_up <= 0 || ramp_down <= 0)
        throw std::invalid_argument("gas turbine: ramp limits must be positive");
    if (pwl_segments < 1)
        throw std::invalid_argument("gas turbine: pwl_segments must be >= 1");
}

void BatteryParams::validate() const {
    if (!(0 <= soc_min && soc_min <= soc_start && soc_start <= soc_max && soc_max <= 1))
        throw std::invalid_argument("battery: SOC fractions out of order");
    if (!(eta_ch > 0 && eta_ch <= 1 && eta_dis > 0 && eta_dis <= 1))
        throw std::invalid_argument("battery: bad efficiency");
    if (capacity < 0 || p_rated < 0)
        throw std::invalid_argument("battery: negative rating");
}

void RenewableParams::validate() const {
    if (n_units < 0) throw std::invalid_argument("renewable: n_units < 0");
    unit_profile.validate();
}

void HeatParams::validate() const {
    if (!(0 <= hs_ch_min && hs_ch_min <= hs_ch_max))
        throw std::invalid_argument("heat: storage charge bounds out of order");
    if (!(0 <= hs_dis_min && hs_dis_min <= hs_dis_max))
        throw std::invalid_argument("heat: storage discharge bounds out of order");
    if (hp_cop <= 0) throw std::invalid_argument("heat: COP must be positive");
}

std::pair<double, double> battery_power_caps(const BatteryParams& b,
                                             double soc_prev, double dt_hours) {
    double ch = std::min((b.soc_max - soc_prev) * b.capacity / (b.eta_ch * dt_hours),
                         b.p_rated);
    double dis = std::min((soc_prev - b.soc_min) * b.capacity * b.eta_dis / dt_hours,
                          b.p_rated);
    return {std::max(0.0, ch), std::max(0.0, dis)};
}

Profile renewable_available(const RenewableParams& r, const Profile& realization) {
    Profile out(realization.grid, Unit::kW);
    for (int t = 0; t < realization.size(); ++t)
        out[t] = r.n_units * realization[t];
    return out;
}

PwlCurve gt_fuel_pwl(const GasTurbineParams& g) {
    if (g.p_min >= g.p_max)
        throw std::invalid_argument("gt_fuel_pwl: p_min must be below p_max");
    g.validate();
    PwlCurve curve;
    int K = g.pwl_segments;
    for (int k = 0; k <= K; ++k) {
        double x = g.p_min + (g.p_max - g.p_min) * k / K;
        curve.breakpoints.emplace_back(x, g.fuel_rate(x));
    }
    // sample-grid estimate of the interpolation error
    double err = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double x = g.p_min + (g.p_max - g.p_min) * i / 400.0;
        int k = std::min(K - 1, static_cast<int>((x - g.p_min) / (g.p_max - g.p_min) * K));
        auto [x0, y0] = curve.breakpoints[static_cast<size_t>(k)];
        auto [x1, y1] = curve.breakpoints[static_cast<size_t>(k + 1)];
        double interp = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        err = std::max(err, std::abs(interp - g.fuel_rate(x)));
    }
    curve.max_interp_error = err;
    return curve;
}

}  // namespace menet

#pragma once

#include <utility>
#include <vector>

#include "menet/forecast.hpp"
#include "menet/timegrid.hpp"

namespace menet {

struct GridTieParams {
    double p_min = 0.0;  // kW, may be negative (export capability)
    double p_max = 0.0;  // kW
    Profile price_buy;   // currency/kWh
    Profile price_sell;  // currency/kWh
    double sigma_gird = 0.0;  // currency/kWh interaction cost on gross exchange

    void validate() const;
};

struct GasTurbineParams {
    double p_min = 0.0;
    double p_max = 0.0;
    // fuel cost rate a*P^3 + b*P^2 + c*P + d, currency per hour
    double fuel_a = 0.0, fuel_b = 0.0, fuel_c = 0.0, fuel_d = 0.0;
    double cost_up = 0.0;     // currency per start
    double cost_down = 0.0;   // currency per stop
    double k_pollution = 0.0; // currency/kWh
    double ramp_up = 0.0;     // kW per step
    double ramp_down = 0.0;   // kW per step
    int pwl_segments = 8;

    double fuel_rate(double p) const {
        return ((fuel_a * p + fuel_b) * p + fuel_c) * p + fuel_d;
    }
    void validate() const;
};

struct BatteryParams {
    double capacity = 0.0;  // kWh
    double p_rated = 0.0;   // kW
    double soc_min = 0.0;   // fraction
    double soc_max = 1.0;   // fraction
    double soc_start = 0.5; // fraction
    double eta_ch = 1.0;
    double eta_dis = 1.0;
    double k_loss = 0.0;    // currency/kWh throughput

    void validate() const;
};

struct RenewableParams {
    int n_units = 0;
    ForecastModel unit_profile;  // per-unit forecast

    void validate() const;
};

struct HeatParams {
    double hp_q_max = 0.0;  // kW thermal
    double hp_cop = 3.0;    // thermal out per electric in
    double hs_ch_min = 0.0, hs_ch_max = 0.0;    // kW thermal
    double hs_dis_min = 0.0, hs_dis_max = 0.0;  // kW thermal
    double hs_capacity = 0.0;   // kWh thermal
    double hs_soc_start = 0.5;  // fraction
    double sigma_hp = 0.0;      // currency/kWh intra-day adjustment
    double sigma_hs = 0.0;

    void validate() const;
};

// Dynamic battery power caps from the previous SOC (discharge cap measured
// from the corridor floor, not the ceiling).
std::pair<double, double> battery_power_caps(const BatteryParams& b,
                                             double soc_prev, double dt_hours);

// n_units times the per-unit realization; dispatch may curtail below this.
Profile renewable_available(const RenewableParams& r, const Profile& realization);

struct PwlCurve {
    std::vector<std::pair<double, double>> breakpoints;
    double max_interp_error = 0.0;
};

// Equally spaced breakpoints of the cubic fuel rate over [p_min, p_max].
PwlCurve gt_fuel_pwl(const GasTurbineParams& g);

}  // namespace menet

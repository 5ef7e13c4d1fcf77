#include "menet/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "menet/forecast.hpp"

namespace menet {

using nlohmann::json;

namespace {

Profile profile_from(const json& j, const TimeGrid& g, Unit u,
                     const std::string& what) {
    Profile p(g, u);
    if (j.is_number()) {
        for (int t = 0; t < g.n_steps; ++t) p[t] = j.get<double>();
        return p;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != g.n_steps)
        throw std::invalid_argument("scenario: " + what + " must be a scalar or " +
                                    std::to_string(g.n_steps) + "-element array");
    for (int t = 0; t < g.n_steps; ++t) p[t] = j[static_cast<size_t>(t)].get<double>();
    return p;
}

json profile_to(const Profile& p) { return json(p.values); }

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<T>();
}

json fleet_to(const FleetSpec& f) {
    return json{{"n_evs", f.n_evs},
                {"arrive_hour_morning", f.arrive_hour_morning},
                {"arrive_hour_evening", f.arrive_hour_evening},
                {"arrive_spread_hours", f.arrive_spread_hours},
                {"morning_fraction", f.morning_fraction},
                {"stay_hours_min", f.stay_hours_min},
                {"stay_hours_max", f.stay_hours_max},
                {"soc_arrive_frac_min", f.soc_arrive_frac_min},
                {"soc_arrive_frac_max", f.soc_arrive_frac_max},
                {"soc_leave_frac_min", f.soc_leave_frac_min},
                {"soc_leave_frac_max", f.soc_leave_frac_max},
                {"soc_max_min_kwh", f.soc_max_min_kwh},
                {"soc_max_max_kwh", f.soc_max_max_kwh},
                {"p_ch_max", f.p_ch_max},
                {"p_dis_max", f.p_dis_max},
                {"eta_ch", f.eta_ch},
                {"eta_dis", f.eta_dis},
                {"eta_ref", f.eta_ref},
                {"seed", f.seed}};
}

FleetSpec fleet_from(const json& j) {
    FleetSpec f;
    f.n_evs = get_or(j, "n_evs", f.n_evs);
    f.arrive_hour_morning = get_or(j, "arrive_hour_morning", f.arrive_hour_morning);
    f.arrive_hour_evening = get_or(j, "arrive_hour_evening", f.arrive_hour_evening);
    f.arrive_spread_hours = get_or(j, "arrive_spread_hours", f.arrive_spread_hours);
    f.morning_fraction = get_or(j, "morning_fraction", f.morning_fraction);
    f.stay_hours_min = get_or(j, "stay_hours_min", f.stay_hours_min);
    f.stay_hours_max = get_or(j, "stay_hours_max", f.stay_hours_max);
    f.soc_arrive_frac_min = get_or(j, "soc_arrive_frac_min", f.soc_arrive_frac_min);
    f.soc_arrive_frac_max = get_or(j, "soc_arrive_frac_max", f.soc_arrive_frac_max);
    f.soc_leave_frac_min = get_or(j, "soc_leave_frac_min", f.soc_leave_frac_min);
    f.soc_leave_frac_max = get_or(j, "soc_leave_frac_max", f.soc_leave_frac_max);
    f.soc_max_min_kwh = get_or(j, "soc_max_min_kwh", f.soc_max_min_kwh);
    f.soc_max_max_kwh = get_or(j, "soc_max_max_kwh", f.soc_max_max_kwh);
    f.p_ch_max = get_or(j, "p_ch_max", f.p_ch_max);
    f.p_dis_max = get_or(j, "p_dis_max", f.p_dis_max);
    f.eta_ch = get_or(j, "eta_ch", f.eta_ch);
    f.eta_dis = get_or(j, "eta_dis", f.eta_dis);
    f.eta_ref = get_or(j, "eta_ref", f.eta_ref);
    f.seed = get_or(j, "seed", f.seed);
    return f;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (version != 1) throw std::invalid_argument("scenario: unsupported version");
    if (!(eta_confidence > 0.5 && eta_confidence < 1.0))
        throw std::invalid_argument("scenario: eta_confidence must lie in (0.5, 1)");
    if (!day_ahead_grid.alignable_with(intra_day_grid))
        throw std::invalid_argument("scenario: grids are not alignable");
    if (load_e.grid != day_ahead_grid || load_h.grid != day_ahead_grid)
        throw std::invalid_argument("scenario: loads must live on the day-ahead grid");
    if (penalty_rate < 0 || c_evc < 0 || lambda_cur < 0 || sigma_ess < 0 ||
        sigma_gt < 0)
        throw std::invalid_argument("scenario: negative cost coefficient");
    if (window_steps < 1 || execute_steps < 1 || execute_steps > window_steps)
        throw std::invalid_argument("scenario: bad rolling window sizes");
    grid_tie.validate();
    gas_turbine.validate();
    battery.validate();
    pv.validate();
    wt.validate();
    heat.validate();
    dr.validate(day_ahead_grid);
    for (const auto& st : stations)
        if (st.id.empty()) throw std::invalid_argument("scenario: station without id");
}

std::vector<EvSession> ScenarioConfig::fleet_for(const StationConfig& st,
                                                 const TimeGrid& grid) const {
    return synthesize_fleet(st.fleet, grid, st.id);
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: JSON parse error: ") +
                                    e.what());
    }
    ScenarioConfig c;
    c.version = get_or(j, "version", 1);
    c.seed = get_or(j, "seed", uint64_t{0});
    const TimeGrid& g = c.day_ahead_grid;

    const json& gt = j.at("grid_tie");
    c.grid_tie.p_min = gt.at("p_min").get<double>();
    c.grid_tie.p_max = gt.at("p_max").get<double>();
    c.grid_tie.price_buy =
        profile_from(gt.at("price_buy"), g, Unit::CurrencyPerKwh, "price_buy");
    c.grid_tie.price_sell =
        profile_from(gt.at("price_sell"), g, Unit::CurrencyPerKwh, "price_sell");
    c.grid_tie.sigma_gird = get_or(gt, "sigma_gird", 0.0);

    const json& t = j.at("gas_turbine");
    c.gas_turbine.p_min = t.at("p_min").get<double>();
    c.gas_turbine.p_max = t.at("p_max").get<double>();
    c.gas_turbine.fuel_a = get_or(t, "fuel_a", 0.0);
    c.gas_turbine.fuel_b = get_or(t, "fuel_b", 0.0);
    c.gas_turbine.fuel_c = get_or(t, "fuel_c", 0.0);
    c.gas_turbine.fuel_d = get_or(t, "fuel_d", 0.0);
    c.gas_turbine.cost_up = get_or(t, "cost_up", 0.0);
    c.gas_turbine.cost_down = get_or(t, "cost_down", 0.0);
    c.gas_turbine.k_pollution = get_or(t, "k_pollution", 0.0);
    c.gas_turbine.ramp_up = t.at("ramp_up").get<double>();
    c.gas_turbine.ramp_down = t.at("ramp_down").get<double>();
    c.gas_turbine.pwl_segments = get_or(t, "pwl_segments", 8);

    const json& b = j.at("battery");
    c.battery.capacity = b.at("capacity").get<double>();
    c.battery.p_rated = b.at("p_rated").get<double>();
    c.battery.soc_min = get_or(b, "soc_min", 0.0);
    c.battery.soc_max = get_or(b, "soc_max", 1.0);
    c.battery.soc_start = get_or(b, "soc_start", 0.5);
    c.battery.eta_ch = get_or(b, "eta_ch", 1.0);
    c.battery.eta_dis = get_or(b, "eta_dis", 1.0);
    c.battery.k_loss = get_or(b, "k_loss", 0.0);

    const json& h = j.at("heat");
    c.heat.hp_q_max = h.at("hp_q_max").get<double>();
    c.heat.hp_cop = get_or(h, "hp_cop", 3.0);
    c.heat.hs_ch_min = get_or(h, "hs_ch_min", 0.0);
    c.heat.hs_ch_max = get_or(h, "hs_ch_max", 0.0);
    c.heat.hs_dis_min = get_or(h, "hs_dis_min", 0.0);
    c.heat.hs_dis_max = get_or(h, "hs_dis_max", 0.0);
    c.heat.hs_capacity = get_or(h, "hs_capacity", 0.0);
    c.heat.hs_soc_start = get_or(h, "hs_soc_start", 0.5);
    c.heat.sigma_hp = get_or(h, "sigma_hp", 0.0);
    c.heat.sigma_hs = get_or(h, "sigma_hs", 0.0);

    c.da_sigma_frac = get_or(j, "da_sigma_frac", 0.10);
    c.intraday_sigma_frac = get_or(j, "intraday_sigma_frac", 0.03);

    const json& rn = j.at("renewables");
    auto read_renewable = [&](const json& r, uint64_t default_seed) {
        RenewableParams p;
        p.n_units = r.at("n_units").get<int>();
        Profile f = profile_from(r.at("forecast"), g, Unit::kW, "renewable forecast");
        double frac = get_or(r, "sigma_frac", c.da_sigma_frac);
        p.unit_profile =
            proportional_forecast(f, frac, get_or(r, "seed", default_seed));
        return p;
    };
    c.pv = read_renewable(rn.at("pv"), c.seed ^ 0x9e37ull);
    c.wt = read_renewable(rn.at("wt"), c.seed ^ 0x79b9ull);

    const json& lo = j.at("loads");
    c.load_e = profile_from(lo.at("electric"), g, Unit::kW, "electric load");
    c.load_h = profile_from(lo.at("heat"), g, Unit::kW, "heat load");

    if (j.contains("dr")) {
        const json& d = j.at("dr");
        c.dr.shiftable_fraction_e = get_or(d, "shiftable_fraction_e", 0.0);
        c.dr.curtail_cap_e = profile_from(d.value("curtail_cap_e", json(0.0)), g,
                                          Unit::kW, "curtail_cap_e");
        c.dr.curtail_cap_h = profile_from(d.value("curtail_cap_h", json(0.0)), g,
                                          Unit::kW, "curtail_cap_h");
        c.dr.lambda_e = get_or(d, "lambda_e", 0.0);
        c.dr.lambda_h = get_or(d, "lambda_h", 0.0);
        c.dr.peak_steps = get_or(d, "peak_steps", std::vector<int>{});
        c.dr.valley_steps = get_or(d, "valley_steps", std::vector<int>{});
    } else {
        c.dr.curtail_cap_e = Profile(g, Unit::kW);
        c.dr.curtail_cap_h = Profile(g, Unit::kW);
    }

    for (const json& s : j.value("stations", json::array())) {
        StationConfig st;
        st.id = s.at("id").get<std::string>();
        st.fleet = fleet_from(s);
        c.stations.push_back(std::move(st));
    }

    c.eta_confidence = get_or(j, "eta_confidence", 0.95);
    c.penalty_rate = get_or(j, "penalty_rate", 0.0);
    c.c_evc = get_or(j, "c_evc", 0.0);
    c.lambda_cur = get_or(j, "lambda_cur", 0.0);
    c.sigma_ess = get_or(j, "sigma_ess", 0.0);
    c.sigma_gt = get_or(j, "sigma_gt", 0.0);
    c.window_steps = get_or(j, "window_steps", 16);
    c.execute_steps = get_or(j, "execute_steps", 1);

    c.validate();
    return c;
}

std::string scenario_to_json_text(const ScenarioConfig& c) {
    json j;
    j["version"] = c.version;
    j["seed"] = c.seed;
    j["eta_confidence"] = c.eta_confidence;
    j["penalty_rate"] = c.penalty_rate;
    j["c_evc"] = c.c_evc;
    j["lambda_cur"] = c.lambda_cur;
    j["sigma_ess"] = c.sigma_ess;
    j["sigma_gt"] = c.sigma_gt;
    j["da_sigma_frac"] = c.da_sigma_frac;
    j["intraday_sigma_frac"] = c.intraday_sigma_frac;
    j["window_steps"] = c.window_steps;
    j["execute_steps"] = c.execute_steps;
    j["grid_tie"] = {{"p_min", c.grid_tie.p_min},
                     {"p_max", c.grid_tie.p_max},
                     {"price_buy", profile_to(c.grid_tie.price_buy)},
                     {"price_sell", profile_to(c.grid_tie.price_sell)},
                     {"sigma_gird", c.grid_tie.sigma_gird}};
    j["gas_turbine"] = {{"p_min", c.gas_turbine.p_min},
                        {"p_max", c.gas_turbine.p_max},
                        {"fuel_a", c.gas_turbine.fuel_a},
                        {"fuel_b", c.gas_turbine.fuel_b},
                        {"fuel_c", c.gas_turbine.fuel_c},
                        {"fuel_d", c.gas_turbine.fuel_d},
                        {"cost_up", c.gas_turbine.cost_up},
                        {"cost_down", c.gas_turbine.cost_down},
                        {"k_pollution", c.gas_turbine.k_pollution},
                        {"ramp_up", c.gas_turbine.ramp_up},
                        {"ramp_down", c.gas_turbine.ramp_down},
                        {"pwl_segments", c.gas_turbine.pwl_segments}};
    j["battery"] = {{"capacity", c.battery.capacity},
                    {"p_rated", c.battery.p_rated},
                    {"soc_min", c.battery.soc_min},
                    {"soc_max", c.battery.soc_max},
                    {"soc_start", c.battery.soc_start},
                    {"eta_ch", c.battery.eta_ch},
                    {"eta_dis", c.battery.eta_dis},
                    {"k_loss", c.battery.k_loss}};
    j["heat"] = {{"hp_q_max", c.heat.hp_q_max},
                 {"hp_cop", c.heat.hp_cop},
                 {"hs_ch_min", c.heat.hs_ch_min},
                 {"hs_ch_max", c.heat.hs_ch_max},
                 {"hs_dis_min", c.heat.hs_dis_min},
                 {"hs_dis_max", c.heat.hs_dis_max},
                 {"hs_capacity", c.heat.hs_capacity},
                 {"hs_soc_start", c.heat.hs_soc_start},
                 {"sigma_hp", c.heat.sigma_hp},
                 {"sigma_hs", c.heat.sigma_hs}};
    auto renewable_to = [](const RenewableParams& p) {
        double frac = 0.0;
        for (int t = 0; t < p.unit_profile.forecast.size(); ++t)
            if (p.unit_profile.forecast[t] > 0) {
                frac = p.unit_profile.sigma[t] / p.unit_profile.forecast[t];
                break;
            }
        return json{{"n_units", p.n_units},
                    {"forecast", profile_to(p.unit_profile.forecast)},
                    {"sigma_frac", frac},
                    {"seed", p.unit_profile.seed}};
    };
    j["renewables"] = {{"pv", renewable_to(c.pv)}, {"wt", renewable_to(c.wt)}};
    j["loads"] = {{"electric", profile_to(c.load_e)},
                  {"heat", profile_to(c.load_h)}};
    j["dr"] = {{"shiftable_fraction_e", c.dr.shiftable_fraction_e},
               {"curtail_cap_e", profile_to(c.dr.curtail_cap_e)},
               {"curtail_cap_h", profile_to(c.dr.curtail_cap_h)},
               {"lambda_e", c.dr.lambda_e},
               {"lambda_h", c.dr.lambda_h},
               {"peak_steps", c.dr.peak_steps},
               {"valley_steps", c.dr.valley_steps}};
    j["stations"] = json::array();
    for (const auto& st : c.stations) {
        json s = fleet_to(st.fleet);
        s["id"] = st.id;
        j["stations"].push_back(std::move(s));
    }
    return j.dump(2);
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

std::string scenario_hash(const ScenarioConfig& cfg) {
    std::string text = scenario_to_json_text(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) h = (h ^ ch) * 1099511628211ull;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace menet

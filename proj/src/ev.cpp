#include "menet/ev.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "menet/rng.hpp"

namespace menet {

void EvSession::validate(const TimeGrid& grid) const {
    if (t_arrive < 0 || t_leave >= grid.n_steps || t_arrive > t_leave)
        throw std::out_of_range("session " + id + ": window outside grid");
    if (!(soc_min <= soc_arrive && soc_arrive <= soc_max))
        throw std::invalid_argument("session " + id + ": soc_arrive outside corridor");
    if (!(soc_min <= soc_leave && soc_leave <= soc_max))
        throw std::invalid_argument("session " + id + ": soc_leave outside corridor");
    if (p_ch_max < 0 || p_dis_max < 0)
        throw std::invalid_argument("session " + id + ": negative power cap");
    if (!(eta_ch > 0 && eta_ch <= 1) || !(eta_dis > 0 && eta_dis <= 1) || eta_ref <= 0)
        throw std::invalid_argument("session " + id + ": bad efficiency");
}

PresenceSeries presence(const EvSession& s, const TimeGrid& grid) {
    s.validate(grid);
    PresenceSeries p;
    p.d.assign(static_cast<size_t>(grid.n_steps), 0);
    for (int t = s.t_arrive; t <= s.t_leave; ++t) p.d[static_cast<size_t>(t)] = 1;
    return p;
}

double soc_step(const EvSession& s, double soc_prev, double p_ch, double p_dis,
                double dt_hours) {
    if (p_ch < -1e-12 || p_ch > s.p_ch_max + 1e-9)
        throw std::invalid_argument("soc_step: charge power outside [0, p_ch_max]");
    if (p_dis < -1e-12 || p_dis > s.p_dis_max + 1e-9)
        throw std::invalid_argument("soc_step: discharge power outside [0, p_dis_max]");
    return soc_prev + s.eta_ch * p_ch * dt_hours -
           s.eta_ref * p_dis * dt_hours / s.eta_dis;
}

Profile boundary_injections(const EvSession& s, const TimeGrid& grid) {
    s.validate(grid);
    Profile out(grid, Unit::kWh);
    out[s.t_arrive] += s.soc_arrive;
    if (s.t_leave + 1 < grid.n_steps) out[s.t_leave + 1] -= s.soc_leave;
    return out;
}

bool soc_target_reachable(const EvSession& s, const TimeGrid& grid) {
    double soc = s.soc_arrive;
    double dt = grid.dt_hours();
    for (int t = s.t_arrive; t <= s.t_leave; ++t) {
        double headroom = std::max(0.0, s.soc_max - soc);
        double p = std::min(s.p_ch_max, headroom / (s.eta_ch * dt));
        soc += s.eta_ch * p * dt;
        if (soc >= s.soc_leave - 1e-9) return true;
    }
    return soc >= s.soc_leave - 1e-9;
}

std::vector<EvSession> synthesize_fleet(const FleetSpec& spec,
                                        const TimeGrid& grid,
                                        const std::string& station_id) {
    std::vector<EvSession> fleet;
    fleet.reserve(static_cast<size_t>(spec.n_evs));
    double dt = grid.dt_hours();
    // FNV-1a so the stream id is stable across platforms
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : station_id) h = (h ^ c) * 1099511628211ull;
    uint64_t stream = rng::splitmix64(h);
    for (int n = 0; n < spec.n_evs; ++n) {
        uint64_t ctr = static_cast<uint64_t>(n) * 16;
        auto u = [&](double lo, double hi) {
            return rng::uniform(spec.seed, stream, ctr++, lo, hi);
        };
        auto gauss = [&]() { return rng::normal(spec.seed, stream ^ 0x5bd1ull, ctr++); };

        EvSession s;
        s.id = station_id + "-ev" + std::to_string(n);
        s.station_id = station_id;
        bool morning = u(0, 1) < spec.morning_fraction;
        double mean = morning ? spec.arrive_hour_morning : spec.arrive_hour_evening;
        double arrive_h = mean + spec.arrive_spread_hours * gauss();
        arrive_h = std::clamp(arrive_h, 0.0, grid.horizon_hours() - 2 * dt);
        double stay_h = u(spec.stay_hours_min, spec.stay_hours_max);
        double leave_h = std::min(arrive_h + stay_h, grid.horizon_hours() - 2 * dt);

        s.t_arrive = static_cast<int>(arrive_h / dt);
        s.t_leave = std::max(s.t_arrive, static_cast<int>(leave_h / dt));
        // keep the departure correction inside the grid
        s.t_leave = std::min(s.t_leave, grid.n_steps - 2);
        s.t_arrive = std::min(s.t_arrive, s.t_leave);

        s.soc_max = u(spec.soc_max_min_kwh, spec.soc_max_max_kwh);
        s.soc_min = 0.1 * s.soc_max;
        s.soc_arrive = u(spec.soc_arrive_frac_min, spec.soc_arrive_frac_max) * s.soc_max;
        s.soc_arrive = std::max(s.soc_arrive, s.soc_min);
        s.soc_leave = u(spec.soc_leave_frac_min, spec.soc_leave_frac_max) * s.soc_max;
        s.p_ch_max = spec.p_ch_max;
        s.p_dis_max = spec.p_dis_max;
        s.eta_ch = spec.eta_ch;
        s.eta_dis = spec.eta_dis;
        s.eta_ref = spec.eta_ref;

        // repair unreachable targets down to the greedy max-rate reachable SOC
        if (!soc_target_reachable(s, grid)) {
            double stay_steps = s.t_leave - s.t_arrive + 1;
            double reachable = std::min(
                s.soc_max, s.soc_arrive + s.eta_ch * s.p_ch_max * dt * stay_steps);
            s.soc_leave = std::max(s.soc_min, reachable);
        }
        s.validate(grid);
        fleet.push_back(std::move(s));
    }
    return fleet;
}

}  // namespace menet

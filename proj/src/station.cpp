#include "menet/station.hpp"

#include <cmath>
#include <stdexcept>

#include "menet/milp.hpp"
#include "menet/simplex.hpp"

namespace menet {

StationEnvelope aggregate(const std::vector<EvSession>& sessions,
                          const TimeGrid& grid, const std::string& station_id) {
    StationEnvelope env;
    env.station_id = station_id;
    env.grid = grid;
    env.p_ch_max = Profile(grid, Unit::kW);
    env.p_dis_max = Profile(grid, Unit::kW);
    env.s_min = Profile(grid, Unit::kWh);
    env.s_max = Profile(grid, Unit::kWh);
    env.delta_s = Profile(grid, Unit::kWh);
    if (sessions.empty()) return env;

    env.eta_ch = sessions.front().eta_ch;
    env.eta_dis = sessions.front().eta_dis;
    env.eta_ref = sessions.front().eta_ref;
    for (const auto& s : sessions) {
        if (s.eta_ch != env.eta_ch || s.eta_dis != env.eta_dis ||
            s.eta_ref != env.eta_ref)
            throw std::invalid_argument(
                "aggregate: sessions must share station efficiencies");
        PresenceSeries d = presence(s, grid);
        Profile inj = boundary_injections(s, grid);
        for (int t = 0; t < grid.n_steps; ++t) {
            if (d.at(t)) {
                env.p_ch_max[t] += s.p_ch_max;
                env.p_dis_max[t] += s.p_dis_max;
                env.s_min[t] += s.soc_min;
                env.s_max[t] += s.soc_max;
            }
            env.delta_s[t] += inj[t];
        }
    }
    return env;
}

Profile implied_soc(const StationEnvelope& env, const Profile& p_ch,
                    const Profile& p_dis) {
    Profile soc(env.grid, Unit::kWh);
    double dt = env.grid.dt_hours();
    double prev = 0.0;
    for (int t = 0; t < env.grid.n_steps; ++t) {
        prev += env.delta_s[t] + env.eta_ch * p_ch[t] * dt -
                env.eta_ref * p_dis[t] * dt / env.eta_dis;
        soc[t] = prev;
    }
    return soc;
}

std::vector<Violation> validate_schedule(const StationEnvelope& env,
                                         const StationSchedule& sch) {
    std::vector<Violation> out;
    if (sch.p_ch.grid != env.grid || sch.p_dis.grid != env.grid ||
        sch.soc.grid != env.grid)
        throw std::invalid_argument("validate_schedule: grid mismatch");
    const double tol = 1e-6;
    double dt = env.grid.dt_hours();
    double prev = 0.0;
    for (int t = 0; t < env.grid.n_steps; ++t) {
        if (sch.p_ch[t] < -tol)
            out.push_back({t, "p_ch >= 0", -sch.p_ch[t]});
        if (sch.p_ch[t] > env.p_ch_max[t] + tol)
            out.push_back({t, "p_ch <= p_ch_max", sch.p_ch[t] - env.p_ch_max[t]});
        if (sch.p_dis[t] < -tol)
            out.push_back({t, "p_dis >= 0", -sch.p_dis[t]});
        if (sch.p_dis[t] > env.p_dis_max[t] + tol)
            out.push_back({t, "p_dis <= p_dis_max", sch.p_dis[t] - env.p_dis_max[t]});
        double want = prev + env.delta_s[t] + env.eta_ch * sch.p_ch[t] * dt -
                      env.eta_ref * sch.p_dis[t] * dt / env.eta_dis;
        if (std::abs(sch.soc[t] - want) > tol)
            out.push_back({t, "soc recursion", std::abs(sch.soc[t] - want)});
        if (sch.soc[t] < env.s_min[t] - tol)
            out.push_back({t, "soc >= s_min", env.s_min[t] - sch.soc[t]});
        if (sch.soc[t] > env.s_max[t] + tol)
            out.push_back({t, "soc <= s_max", sch.soc[t] - env.s_max[t]});
        prev = sch.soc[t];
    }
    return out;
}

DisaggregationResult disaggregate(const StationEnvelope& env,
                                  const StationSchedule& sch,
                                  const std::vector<EvSession>& sessions) {
    const TimeGrid& grid = env.grid;
    const double dt = grid.dt_hours();
    const int T = grid.n_steps;

    MilpModel m;
    // per-session power and SOC variables over the presence window
    struct Cols {
        std::vector<int> ch, dis, soc;  // indexed by t - t_arrive
    };
    std::vector<Cols> cols(sessions.size());
    for (size_t n = 0; n < sessions.size(); ++n) {
        const auto& s = sessions[n];
        int len = s.t_leave - s.t_arrive + 1;
        for (int k = 0; k < len; ++k) {
            cols[n].ch.push_back(m.add_var("ch", 0.0, s.p_ch_max));
            cols[n].dis.push_back(m.add_var("dis", 0.0, s.p_dis_max));
            cols[n].soc.push_back(m.add_var("soc", s.soc_min, s.soc_max));
        }
        // SOC recursion anchored at soc_arrive, terminal pinned to soc_leave
        for (int k = 0; k < len; ++k) {
            std::vector<std::pair<int, double>> terms{
                {cols[n].soc[static_cast<size_t>(k)], 1.0},
                {cols[n].ch[static_cast<size_t>(k)], -s.eta_ch * dt},
                {cols[n].dis[static_cast<size_t>(k)], s.eta_ref * dt / s.eta_dis}};
            double rhs = 0.0;
            if (k == 0) rhs = s.soc_arrive;
            else terms.emplace_back(cols[n].soc[static_cast<size_t>(k - 1)], -1.0);
            m.add_constr("soc_rec", std::move(terms), Sense::EQ, rhs);
        }
        m.set_bounds(cols[n].soc.back(), s.soc_leave, s.soc_leave);
    }

    // Per-step NET station power pinned to the aggregate (the station bus
    // sees only the net; EV-to-EV transfers inside the station are physical
    // and must stay decomposable). Elasticized so a gap is measurable, and
    // gross throughput carries a small penalty so wash cycles only appear
    // when they are the only way to realize the net.
    std::vector<int> slack;
    for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> terms;
        for (size_t n = 0; n < sessions.size(); ++n) {
            const auto& s = sessions[n];
            if (t < s.t_arrive || t > s.t_leave) continue;
            int k = t - s.t_arrive;
            terms.emplace_back(cols[n].ch[static_cast<size_t>(k)], 1.0);
            terms.emplace_back(cols[n].dis[static_cast<size_t>(k)], -1.0);
            m.add_obj(cols[n].ch[static_cast<size_t>(k)], 1e-3);
            m.add_obj(cols[n].dis[static_cast<size_t>(k)], 1e-3);
        }
        int sp = m.add_var("slack_pos", 0.0, kInf, VarType::Continuous, 1e4);
        int sn = m.add_var("slack_neg", 0.0, kInf, VarType::Continuous, 1e4);
        slack.push_back(sp);
        slack.push_back(sn);
        terms.emplace_back(sp, 1.0);
        terms.emplace_back(sn, -1.0);
        m.add_constr("sum_net", std::move(terms), Sense::EQ,
                     sch.p_ch[t] - sch.p_dis[t]);
    }

    // smoothness tie-break: minimize the sum of per-session peaks
    for (size_t n = 0; n < sessions.size(); ++n) {
        int q = m.add_var("peak", 0.0, kInf, VarType::Continuous, 1.0);
        for (size_t k = 0; k < cols[n].ch.size(); ++k) {
            m.add_constr("pk_ch", {{q, 1.0}, {cols[n].ch[k], -1.0}}, Sense::GE, 0.0);
            m.add_constr("pk_dis", {{q, 1.0}, {cols[n].dis[k], -1.0}}, Sense::GE, 0.0);
        }
    }

    LpResult r = solve_lp(m);
    DisaggregationResult res;
    if (r.status != LpStatus::Optimal) {
        res.decomposable = false;
        res.gap_kwh = kInf;
        return res;
    }
    double gap_power = 0.0;
    for (int sv : slack) gap_power += r.x[static_cast<size_t>(sv)];
    res.gap_kwh = gap_power * dt;
    res.decomposable = gap_power <= 1e-6;
    if (!res.decomposable) return res;

    for (size_t n = 0; n < sessions.size(); ++n) {
        SessionSchedule ss;
        ss.session_id = sessions[n].id;
        ss.p_ch = Profile(grid, Unit::kW);
        ss.p_dis = Profile(grid, Unit::kW);
        for (size_t k = 0; k < cols[n].ch.size(); ++k) {
            int t = sessions[n].t_arrive + static_cast<int>(k);
            ss.p_ch[t] = r.x[static_cast<size_t>(cols[n].ch[k])];
            ss.p_dis[t] = r.x[static_cast<size_t>(cols[n].dis[k])];
        }
        res.per_session.push_back(std::move(ss));
    }
    return res;
}

}  // namespace menet

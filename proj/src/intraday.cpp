#include "menet/intraday.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "menet/devices.hpp"
#include "menet/rng.hpp"

namespace menet {

namespace {

constexpr uint64_t kStreamFreshPv = 9101;
constexpr uint64_t kStreamFreshWt = 9102;

}  // namespace

RollingConfig RollingConfig::from_scenario(const ScenarioConfig& cfg) {
    RollingConfig rc;
    rc.window_steps = cfg.window_steps;
    rc.execute_steps = cfg.execute_steps;
    rc.sigma_ess = cfg.sigma_ess;
    rc.sigma_gt = cfg.sigma_gt;
    rc.sigma_gird = cfg.grid_tie.sigma_gird;
    rc.c_evc = cfg.c_evc;
    rc.sigma_hs = cfg.heat.sigma_hs;
    rc.sigma_hp = cfg.heat.sigma_hp;
    return rc;
}

void RollingConfig::validate() const {
    if (window_steps <= 0) throw std::invalid_argument("window_steps <= 0");
    if (execute_steps <= 0 || execute_steps > window_steps)
        throw std::invalid_argument("execute_steps out of range");
    for (double s : {sigma_ess, sigma_gt, sigma_gird, c_evc, sigma_hs, sigma_hp})
        if (s < 0.0)
            throw std::invalid_argument("adjustment coefficients must be >= 0");
}

std::vector<EvSession> expand_sessions(const std::vector<EvSession>& fleet,
                                       const TimeGrid& da_grid,
                                       const TimeGrid& id_grid) {
    if (!da_grid.alignable_with(id_grid) ||
        da_grid.step_minutes % id_grid.step_minutes != 0)
        throw std::invalid_argument("expand_sessions: grids not alignable");
    int f = da_grid.step_minutes / id_grid.step_minutes;
    std::vector<EvSession> out = fleet;
    for (auto& s : out) {
        s.t_arrive = s.t_arrive * f;
        s.t_leave = s.t_leave * f + (f - 1);
        s.validate(id_grid);
    }
    return out;
}

IntradayInputs prepare_intraday(const ScenarioConfig& cfg,
                                const DispatchPlan& plan) {
    if (plan.grid != cfg.day_ahead_grid)
        throw std::invalid_argument("prepare_intraday: plan grid mismatch");
    const TimeGrid& id = cfg.intra_day_grid;
    const int f = cfg.day_ahead_grid.step_minutes / id.step_minutes;

    IntradayInputs in;
    in.grid = id;
    for (const auto& st : cfg.stations) {
        auto fleet = cfg.fleet_for(st, cfg.day_ahead_grid);
        auto expanded = expand_sessions(fleet, cfg.day_ahead_grid, id);
        in.envelopes.push_back(aggregate(expanded, id, st.id));
    }

    DispatchPlan& r = in.reference;
    r.grid = id;
    r.p_gt = resample(plan.p_gt, id);
    r.p_buy = resample(plan.p_buy, id);
    r.p_sell = resample(plan.p_sell, id);
    r.p_ess_ch = resample(plan.p_ess_ch, id);
    r.p_ess_dis = resample(plan.p_ess_dis, id);
    r.p_hp = resample(plan.p_hp, id);
    r.q_hp = resample(plan.q_hp, id);
    r.h_hs_ch = resample(plan.h_hs_ch, id);
    r.h_hs_dis = resample(plan.h_hs_dis, id);
    r.p_pv_used = resample(plan.p_pv_used, id);
    r.p_wt_used = resample(plan.p_wt_used, id);
    r.p_curtailed = resample(plan.p_curtailed, id);
    r.reserve = resample(plan.reserve, id);
    for (size_t n = 0; n < plan.stations.size(); ++n) {
        const auto& sd = plan.stations[n];
        StationDispatch x;
        x.station_id = sd.station_id;
        x.schedule.p_ch = resample(sd.schedule.p_ch, id);
        x.schedule.p_dis = resample(sd.schedule.p_dis, id);
        // recursion-consistent fine-grid SOC (not a resample: within an
        // hour the SOC ramps while the resampled hourly value is flat)
        x.schedule.soc =
            implied_soc(in.envelopes[n], x.schedule.p_ch, x.schedule.p_dis);
        r.stations.push_back(std::move(x));
    }
    {
        const BatteryParams& bat = cfg.battery;
        const double dt = id.dt_hours();
        r.ess_soc = Profile(id, Unit::kWh);
        r.hs_soc = Profile(id, Unit::kWh);
        double es = bat.soc_start * bat.capacity;
        double hs = cfg.heat.hs_soc_start * cfg.heat.hs_capacity;
        for (int t = 0; t < id.n_steps; ++t) {
            es += bat.eta_ch * r.p_ess_ch[t] * dt - r.p_ess_dis[t] * dt / bat.eta_dis;
            hs += (r.h_hs_ch[t] - r.h_hs_dis[t]) * dt;
            r.ess_soc[t] = es;
            r.hs_soc[t] = hs;
        }
    }
    r.dr.shift_in = resample(plan.dr.shift_in, id);
    r.dr.shift_out = resample(plan.dr.shift_out, id);
    r.dr.curtail_e = resample(plan.dr.curtail_e, id);
    r.dr.curtail_h = resample(plan.dr.curtail_h, id);
    for (int t = 0; t < id.n_steps; ++t) {
        int h = t / f;
        r.gt_on.push_back(plan.gt_on[static_cast<size_t>(h)]);
        r.gt_start.push_back(
            t % f == 0 ? plan.gt_start[static_cast<size_t>(h)] : 0);
        r.gt_stop.push_back(
            t % f == 0 ? plan.gt_stop[static_cast<size_t>(h)] : 0);
        in.gt_commit.push_back(plan.gt_on[static_cast<size_t>(h)]);
    }

    auto [le, lh] = effective_loads(cfg.load_e, cfg.load_h, plan.dr);
    in.load_e_eff = resample(le, id);
    in.load_h_eff = resample(lh, id);
    in.reserve = r.reserve;
    return in;
}

namespace {

// SOC bounds for the summed station state. At hour-final steps the hourly
// corridor applies; intermediate steps get a relaxation wide enough to
// contain any trajectory whose hour-boundary points satisfy the corridor
// (boundary injections land mid-hour on the fine grid only as hour starts).
void station_soc_bounds(const StationEnvelope& e, int t, int f, double& lb,
                        double& ub) {
    if ((t + 1) % f == 0) {
        lb = e.s_min[t];
        ub = e.s_max[t];
        return;
    }
    int h0 = (t / f) * f;  // hour start
    double prev_lb = 0.0, prev_ub = 0.0;
    if (h0 > 0) {
        prev_lb = e.s_min[h0 - 1];
        prev_ub = e.s_max[h0 - 1];
    }
    double delta = 0.0;
    for (int k = h0; k < h0 + f; ++k) delta += std::abs(e.delta_s[k]);
    lb = std::min(prev_lb, e.s_min[t]) - delta;
    ub = std::max(prev_ub, e.s_max[t]) + delta;
}

// Priced |expr - ref| epigraph: a >= expr - ref, a >= ref - expr.
int add_deviation(MilpModel& m, const std::vector<std::pair<int, double>>& expr,
                  double ref, double big_m, double coeff, double dt,
                  const std::string& tag) {
    int a = m.add_var(tag + "_abs", 0.0, big_m, VarType::Continuous,
                      coeff * dt);
    std::vector<std::pair<int, double>> up{{a, 1.0}}, dn{{a, 1.0}};
    for (auto [var, c] : expr) {
        up.emplace_back(var, -c);
        dn.emplace_back(var, c);
    }
    m.add_constr(tag + "_up", std::move(up), Sense::GE, -ref);
    m.add_constr(tag + "_dn", std::move(dn), Sense::GE, ref);
    return a;
}

}  // namespace

MilpModel build_window_model(const RollingConfig& rc,
                             const ScenarioConfig& cfg,
                             const IntradayInputs& in,
                             const SystemState& state,
                             const Profile& fresh_pv_avail,
                             const Profile& fresh_wt_avail, WindowVars& v,
                             bool relax_tie) {
    rc.validate();
    const TimeGrid& g = in.grid;
    const int T = g.n_steps;
    if (state.step < 0 || state.step >= T)
        throw std::invalid_argument("window: state.step out of range");
    if (state.station_soc.size() != in.envelopes.size())
        throw std::invalid_argument("window: station state size mismatch");
    const int f = cfg.day_ahead_grid.step_minutes / g.step_minutes;
    const double dt = g.dt_hours();
    const GasTurbineParams& gt = cfg.gas_turbine;
    const BatteryParams& bat = cfg.battery;
    const HeatParams& heat = cfg.heat;
    const DispatchPlan& ref = in.reference;

    v = WindowVars{};
    v.w0 = state.step;
    v.len = std::min(rc.window_steps, T - state.step);
    v.st_ch.resize(in.envelopes.size());
    v.st_dis.resize(in.envelopes.size());
    v.st_soc.resize(in.envelopes.size());

    double buy_cap = std::max(0.0, cfg.grid_tie.p_max);
    double sell_cap = std::max(0.0, -cfg.grid_tie.p_min);

    MilpModel m;
    for (int k = 0; k < v.len; ++k) {
        int t = v.w0 + k;
        std::string s = std::to_string(t);
        int u = in.gt_commit[static_cast<size_t>(t)];
        v.p_gt.push_back(
            m.add_var("p_gt" + s, u ? gt.p_min : 0.0, u ? gt.p_max : 0.0));
        v.p_buy.push_back(m.add_var("p_buy" + s, 0.0, buy_cap));
        v.p_sell.push_back(m.add_var("p_sell" + s, 0.0, sell_cap));
        v.ess_ch.push_back(m.add_var("ess_ch" + s, 0.0, bat.p_rated));
        v.ess_dis.push_back(m.add_var("ess_dis" + s, 0.0, bat.p_rated));
        v.ess_soc.push_back(m.add_var("ess_soc" + s,
                                      bat.soc_min * bat.capacity,
                                      bat.soc_max * bat.capacity));
        v.q_hp.push_back(m.add_var("q_hp" + s, 0.0, heat.hp_q_max));
        v.hs_ch.push_back(m.add_var("hs_ch" + s, heat.hs_ch_min,
                                    heat.hs_ch_max));
        v.hs_dis.push_back(m.add_var("hs_dis" + s, heat.hs_dis_min,
                                     heat.hs_dis_max));
        v.hs_soc.push_back(m.add_var("hs_soc" + s, 0.0, heat.hs_capacity));
        // the epsilon price keeps every energy source nonzero-marginal, so
        // charge/discharge wash cycles (which burn energy) never tie with
        // exclusive dispatch; far below the sigma coefficients, it cannot
        // displace the reference at zero forecast error
        v.pv_used.push_back(m.add_var("pv_used" + s, 0.0,
                                      std::max(0.0, fresh_pv_avail[t]),
                                      VarType::Continuous, 1e-4 * dt));
        v.wt_used.push_back(m.add_var("wt_used" + s, 0.0,
                                      std::max(0.0, fresh_wt_avail[t]),
                                      VarType::Continuous, 1e-4 * dt));
        for (size_t n = 0; n < in.envelopes.size(); ++n) {
            const StationEnvelope& e = in.envelopes[n];
            std::string tag = "st" + std::to_string(n) + "_" + s;
            double lb, ub;
            station_soc_bounds(e, t, f, lb, ub);
            v.st_ch[n].push_back(m.add_var(tag + "_ch", 0.0, e.p_ch_max[t]));
            v.st_dis[n].push_back(m.add_var(tag + "_dis", 0.0, e.p_dis_max[t]));
            v.st_soc[n].push_back(m.add_var(tag + "_soc", lb, ub));
        }
        if (relax_tie)
            v.emergency.push_back(m.add_var("emerg" + s, 0.0, kInf,
                                            VarType::Continuous, 1e5 * dt));
    }

    for (int k = 0; k < v.len; ++k) {
        int t = v.w0 + k;
        std::string s = std::to_string(t);
        int u = in.gt_commit[static_cast<size_t>(t)];
        int u_prev = k == 0 ? (state.gt_on ? 1 : 0)
                            : in.gt_commit[static_cast<size_t>(t - 1)];
        double su = std::max(0, u - u_prev);
        double sd = std::max(0, u_prev - u);
        // ramp against the previous setpoint, with the start/stop allowance
        {
            std::vector<std::pair<int, double>> up{{v.p_gt[k], 1.0}};
            std::vector<std::pair<int, double>> dn{{v.p_gt[k], -1.0}};
            double up_rhs = gt.ramp_up + gt.p_min * su;
            double dn_rhs = gt.ramp_down + gt.p_min * sd;
            if (k == 0) {
                up_rhs += state.p_gt_prev;
                dn_rhs -= state.p_gt_prev;
            } else {
                up.emplace_back(v.p_gt[k - 1], -1.0);
                dn.emplace_back(v.p_gt[k - 1], 1.0);
            }
            m.add_constr("gt_rup" + s, std::move(up), Sense::LE, up_rhs);
            m.add_constr("gt_rdn" + s, std::move(dn), Sense::LE, dn_rhs);
        }
        // battery SOC recursion anchored at the current state
        {
            std::vector<std::pair<int, double>> terms{
                {v.ess_soc[k], 1.0},
                {v.ess_ch[k], -bat.eta_ch * dt},
                {v.ess_dis[k], dt / bat.eta_dis}};
            double rhs = 0.0;
            if (k == 0) rhs = state.ess_soc;
            else terms.emplace_back(v.ess_soc[k - 1], -1.0);
            m.add_constr("ess_rec" + s, std::move(terms), Sense::EQ, rhs);
        }
        {
            std::vector<std::pair<int, double>> terms{{v.hs_soc[k], 1.0},
                                                      {v.hs_ch[k], -dt},
                                                      {v.hs_dis[k], dt}};
            double rhs = 0.0;
            if (k == 0) rhs = state.hs_soc;
            else terms.emplace_back(v.hs_soc[k - 1], -1.0);
            m.add_constr("hs_rec" + s, std::move(terms), Sense::EQ, rhs);
        }
        for (size_t n = 0; n < in.envelopes.size(); ++n) {
            const StationEnvelope& e = in.envelopes[n];
            std::vector<std::pair<int, double>> terms{
                {v.st_soc[n][k], 1.0},
                {v.st_ch[n][k], -e.eta_ch * dt},
                {v.st_dis[n][k], e.eta_ref * dt / e.eta_dis}};
            double rhs = e.delta_s[t];
            if (k == 0) rhs += state.station_soc[n];
            else terms.emplace_back(v.st_soc[n][k - 1], -1.0);
            m.add_constr("st" + std::to_string(n) + "_rec" + s,
                         std::move(terms), Sense::EQ, rhs);
        }
        // electric balance keeps the scheduled day-ahead margin on the rhs;
        // no new reserve is computed inside the window
        {
            std::vector<std::pair<int, double>> terms{
                {v.p_gt[k], 1.0},      {v.p_buy[k], 1.0},
                {v.p_sell[k], -1.0},   {v.ess_dis[k], 1.0},
                {v.ess_ch[k], -1.0},   {v.pv_used[k], 1.0},
                {v.wt_used[k], 1.0},   {v.q_hp[k], -1.0 / heat.hp_cop}};
            for (size_t n = 0; n < in.envelopes.size(); ++n) {
                terms.emplace_back(v.st_dis[n][k], 1.0);
                terms.emplace_back(v.st_ch[n][k], -1.0);
            }
            if (relax_tie) terms.emplace_back(v.emergency[k], 1.0);
            m.add_constr("ebal" + s, std::move(terms), Sense::EQ,
                         in.load_e_eff[t] + in.reserve[t]);
        }
        m.add_constr("hbal" + s,
                     {{v.q_hp[k], 1.0}, {v.hs_dis[k], 1.0}, {v.hs_ch[k], -1.0}},
                     Sense::EQ, in.load_h_eff[t]);

        // adjustment objective: priced absolute deviations from the plan
        double m_gt = gt.p_max + std::abs(ref.p_gt[t]) + 1.0;
        double m_ex = buy_cap + sell_cap +
                      std::abs(ref.p_buy[t] - ref.p_sell[t]) + 1.0;
        double m_es = bat.p_rated + 1.0 +
                      std::max(std::abs(ref.p_ess_ch[t]),
                               std::abs(ref.p_ess_dis[t]));
        double m_hp = heat.hp_q_max + std::abs(ref.q_hp[t]) + 1.0;
        double m_hs = std::max(heat.hs_ch_max, heat.hs_dis_max) + 1.0 +
                      std::max(std::abs(ref.h_hs_ch[t]),
                               std::abs(ref.h_hs_dis[t]));
        add_deviation(m, {{v.p_gt[k], 1.0}}, ref.p_gt[t], m_gt, rc.sigma_gt,
                      dt, "gt" + s);
        add_deviation(m, {{v.p_buy[k], 1.0}, {v.p_sell[k], -1.0}},
                      ref.p_buy[t] - ref.p_sell[t], m_ex, rc.sigma_gird, dt,
                      "ex" + s);
        add_deviation(m, {{v.ess_ch[k], 1.0}}, ref.p_ess_ch[t], m_es,
                      rc.sigma_ess, dt, "ec" + s);
        add_deviation(m, {{v.ess_dis[k], 1.0}}, ref.p_ess_dis[t], m_es,
                      rc.sigma_ess, dt, "ed" + s);
        for (size_t n = 0; n < in.envelopes.size(); ++n) {
            const StationSchedule& rs = ref.stations[n].schedule;
            double m_st = in.envelopes[n].p_ch_max[t] +
                          in.envelopes[n].p_dis_max[t] + 1.0 +
                          std::max(std::abs(rs.p_ch[t]), std::abs(rs.p_dis[t]));
            std::string tag = "st" + std::to_string(n) + "_" + s;
            add_deviation(m, {{v.st_ch[n][k], 1.0}}, rs.p_ch[t], m_st,
                          rc.c_evc, dt, tag + "c");
            add_deviation(m, {{v.st_dis[n][k], 1.0}}, rs.p_dis[t], m_st,
                          rc.c_evc, dt, tag + "d");
        }
        add_deviation(m, {{v.q_hp[k], 1.0}}, ref.q_hp[t], m_hp, rc.sigma_hp,
                      dt, "hp" + s);
        add_deviation(m, {{v.hs_ch[k], 1.0}}, ref.h_hs_ch[t], m_hs,
                      rc.sigma_hs, dt, "hc" + s);
        add_deviation(m, {{v.hs_dis[k], 1.0}}, ref.h_hs_dis[t], m_hs,
                      rc.sigma_hs, dt, "hd" + s);
    }

    // Terminal anchoring: every storage must be back on the plan trajectory
    // at the window's last step. Commitments beyond the horizon (departure
    // withdrawals, end-of-day cyclic SOC) then stay reachable from every
    // executed state, because the reference itself honors them. Elasticized
    // only in the emergency solve.
    {
        int ke = v.len - 1;
        int te = v.w0 + ke;
        auto anchor = [&](int var, double rhs, const std::string& tag) {
            std::vector<std::pair<int, double>> terms{{var, 1.0}};
            if (relax_tie) {
                int sp = m.add_var(tag + "_sp", 0.0, kInf, VarType::Continuous,
                                   1e5);
                int sn = m.add_var(tag + "_sn", 0.0, kInf, VarType::Continuous,
                                   1e5);
                terms.emplace_back(sp, 1.0);
                terms.emplace_back(sn, -1.0);
            }
            m.add_constr(tag, std::move(terms), Sense::EQ, rhs);
        };
        anchor(v.ess_soc[ke], ref.ess_soc[te], "anchor_ess");
        anchor(v.hs_soc[ke], ref.hs_soc[te], "anchor_hs");
        for (size_t n = 0; n < in.envelopes.size(); ++n)
            anchor(v.st_soc[n][ke], ref.stations[n].schedule.soc[te],
                   "anchor_st" + std::to_string(n));
    }
    return m;
}

namespace {

// Per-step adjustment cost of executed setpoints against the reference.
WindowCost step_adjustment(const RollingConfig& rc, const DispatchPlan& ref,
                           const DispatchPlan& exe, int t, double dt) {
    WindowCost c;
    c.c_g += rc.sigma_gt * std::abs(exe.p_gt[t] - ref.p_gt[t]) * dt;
    c.c_g += rc.sigma_gird *
             std::abs((exe.p_buy[t] - exe.p_sell[t]) -
                      (ref.p_buy[t] - ref.p_sell[t])) *
             dt;
    c.c_g += rc.sigma_ess *
             (std::abs(exe.p_ess_ch[t] - ref.p_ess_ch[t]) +
              std::abs(exe.p_ess_dis[t] - ref.p_ess_dis[t])) *
             dt;
    for (size_t n = 0; n < exe.stations.size(); ++n) {
        const auto& a = exe.stations[n].schedule;
        const auto& b = ref.stations[n].schedule;
        c.c_g += rc.c_evc *
                 (std::abs(a.p_ch[t] - b.p_ch[t]) +
                  std::abs(a.p_dis[t] - b.p_dis[t])) *
                 dt;
    }
    c.c_h += rc.sigma_hp * std::abs(exe.q_hp[t] - ref.q_hp[t]) * dt;
    c.c_h += rc.sigma_hs *
             (std::abs(exe.h_hs_ch[t] - ref.h_hs_ch[t]) +
              std::abs(exe.h_hs_dis[t] - ref.h_hs_dis[t])) *
             dt;
    return c;
}

}  // namespace

std::pair<Profile, Profile> realize_availability(const ScenarioConfig& cfg,
                                                 uint64_t realization_seed) {
    Profile pv_unit = sample_realization(cfg.pv.unit_profile, realization_seed);
    Profile wt_unit = sample_realization(cfg.wt.unit_profile, realization_seed);
    Profile pv = renewable_available(cfg.pv, pv_unit);
    Profile wt = renewable_available(cfg.wt, wt_unit);
    return {resample(pv, cfg.intra_day_grid), resample(wt, cfg.intra_day_grid)};
}

ExecutionTrace roll(const RollingConfig& rc, const ScenarioConfig& cfg,
                    const DispatchPlan& plan, uint64_t realization_seed) {
    rc.validate();
    IntradayInputs in = prepare_intraday(cfg, plan);
    const TimeGrid& g = in.grid;
    const int T = g.n_steps;
    const double dt = g.dt_hours();
    auto [pv_real, wt_real] = realize_availability(cfg, realization_seed);

    // day-ahead availability resampled, as the scale of intra-day noise
    Profile pv_da = resample(
        renewable_available(cfg.pv, cfg.pv.unit_profile.forecast), g);
    Profile wt_da = resample(
        renewable_available(cfg.wt, cfg.wt.unit_profile.forecast), g);

    ExecutionTrace tr;
    tr.grid = g;
    tr.pv_avail_realized = pv_real;
    tr.wt_avail_realized = wt_real;
    DispatchPlan& ex = tr.executed;
    ex = in.reference;  // same shapes; every value overwritten below
    ex.costs = CostBreakdown{};

    SystemState st;
    st.step = 0;
    st.ess_soc = cfg.battery.soc_start * cfg.battery.capacity;
    st.hs_soc = cfg.heat.hs_soc_start * cfg.heat.hs_capacity;
    st.station_soc.assign(in.envelopes.size(), 0.0);
    st.gt_on = false;
    st.p_gt_prev = 0.0;

    while (st.step < T) {
        // fresh forecasts: exact at the steps about to execute, noisy beyond
        Profile fpv(g, Unit::kW), fwt(g, Unit::kW);
        int len = std::min(rc.window_steps, T - st.step);
        for (int k = 0; k < len; ++k) {
            int t = st.step + k;
            uint64_t ctr = static_cast<uint64_t>(st.step) * 1000 +
                           static_cast<uint64_t>(t);
            if (k < rc.execute_steps) {
                fpv[t] = pv_real[t];
                fwt[t] = wt_real[t];
            } else {
                double spv = cfg.intraday_sigma_frac * std::max(0.0, pv_da[t]);
                double swt = cfg.intraday_sigma_frac * std::max(0.0, wt_da[t]);
                fpv[t] = std::max(0.0, pv_real[t] +
                                           spv * rng::normal(realization_seed,
                                                             kStreamFreshPv,
                                                             ctr));
                fwt[t] = std::max(0.0, wt_real[t] +
                                           swt * rng::normal(realization_seed,
                                                             kStreamFreshWt,
                                                             ctr));
            }
        }

        WindowVars v;
        MilpModel m = build_window_model(rc, cfg, in, st, fpv, fwt, v, false);
        Solution sol = solve(m);
        bool relaxed = false;
        if (!sol.optimal()) {
            m = build_window_model(rc, cfg, in, st, fpv, fwt, v, true);
            sol = solve(m);
            relaxed = true;
            if (!sol.optimal())
                throw std::runtime_error(
                    "intraday: window at step " + std::to_string(st.step) +
                    " infeasible even with emergency purchase");
        }

        int n_exec = std::min(rc.execute_steps, v.len);
        for (int k = 0; k < n_exec; ++k) {
            int t = v.w0 + k;
            ex.p_gt[t] = sol.value(v.p_gt[k]);
            double buy = sol.value(v.p_buy[k]);
            double sell = sol.value(v.p_sell[k]);
            double wash = std::min(buy, sell);  // balance-neutral, net-priced
            ex.p_buy[t] = buy - wash;
            ex.p_sell[t] = sell - wash;
            // Wash-cycle canonicalization: removing min(ch, dis) from both
            // sides is balance-neutral but raises SOC (the round-trip loss
            // vanishes). The overshoot against the solver's own SOC value is
            // absorbed by trimming charge power, then by extra discharge, so
            // the executed state never leaves the solver-feasible
            // trajectory; the freed supply ("spill") is curtailed from
            // renewables afterwards, keeping the step balance intact.
            double spill = 0.0;
            {
                const BatteryParams& bat = cfg.battery;
                double ch = sol.value(v.ess_ch[k]);
                double dis = sol.value(v.ess_dis[k]);
                double w = std::min(ch, dis);
                ch -= w;
                dis -= w;
                double soc = st.ess_soc + bat.eta_ch * ch * dt -
                             dis * dt / bat.eta_dis;
                double target = sol.value(v.ess_soc[k]);
                if (soc > target + 1e-12) {
                    double r =
                        std::min((soc - target) / (bat.eta_ch * dt), ch);
                    ch -= r;
                    spill += r;
                    soc -= bat.eta_ch * r * dt;
                }
                if (soc > target + 1e-12) {
                    double d = (soc - target) * bat.eta_dis / dt;
                    dis += d;
                    spill += d;
                    soc = target;
                }
                ex.p_ess_ch[t] = ch;
                ex.p_ess_dis[t] = dis;
                ex.ess_soc[t] = soc;
            }
            ex.q_hp[t] = sol.value(v.q_hp[k]);
            ex.p_hp[t] = ex.q_hp[t] / cfg.heat.hp_cop;
            double hch = sol.value(v.hs_ch[k]);
            double hdis = sol.value(v.hs_dis[k]);
            if (cfg.heat.hs_ch_min == 0.0 && cfg.heat.hs_dis_min == 0.0) {
                double w = std::min(hch, hdis);
                hch -= w;
                hdis -= w;
            }
            ex.h_hs_ch[t] = hch;
            ex.h_hs_dis[t] = hdis;
            ex.hs_soc[t] = sol.value(v.hs_soc[k]);
            for (size_t n = 0; n < in.envelopes.size(); ++n) {
                const StationEnvelope& e = in.envelopes[n];
                auto& sch = ex.stations[n].schedule;
                double ch = sol.value(v.st_ch[n][k]);
                double dis = sol.value(v.st_dis[n][k]);
                double w = std::min(ch, dis);
                ch -= w;
                dis -= w;
                double soc = st.station_soc[n] + e.delta_s[t] +
                             e.eta_ch * ch * dt -
                             e.eta_ref * dis * dt / e.eta_dis;
                double target = sol.value(v.st_soc[n][k]);
                if (soc > target + 1e-12) {
                    double r = std::min((soc - target) / (e.eta_ch * dt), ch);
                    ch -= r;
                    spill += r;
                    soc -= e.eta_ch * r * dt;
                }
                if (soc > target + 1e-12) {
                    double d = (soc - target) * e.eta_dis / (e.eta_ref * dt);
                    dis += d;
                    spill += d;
                    soc = target;
                }
                sch.p_ch[t] = ch;
                sch.p_dis[t] = dis;
                sch.soc[t] = soc;
                st.station_soc[n] = soc;
            }
            ex.p_pv_used[t] = sol.value(v.pv_used[k]);
            ex.p_wt_used[t] = sol.value(v.wt_used[k]);
            // absorb spill: curtail renewables first, then shift the tie
            // line (less buy / more sell); the step balance is preserved
            for (double* src : {&ex.p_wt_used[t], &ex.p_pv_used[t],
                                &ex.p_buy[t]}) {
                double cut = std::min(spill, *src);
                *src -= cut;
                spill -= cut;
            }
            if (spill > 1e-12 && ex.p_sell[t] == 0.0) ex.p_sell[t] += spill;
            ex.p_curtailed[t] =
                pv_real[t] - ex.p_pv_used[t] + wt_real[t] - ex.p_wt_used[t];
            if (relaxed) {
                double e = sol.value(v.emergency[k]);
                if (e > 1e-6) {
                    tr.emergency.push_back({t, "tie_line", e});
                    ex.p_buy[t] += e;  // delivered over the tie regardless
                }
            }
            st.ess_soc = ex.ess_soc[t];
            st.hs_soc = ex.hs_soc[t];
            st.gt_on = in.gt_commit[static_cast<size_t>(t)] != 0;
            st.p_gt_prev = ex.p_gt[t];

            WindowCost sc = step_adjustment(rc, in.reference, ex, t, dt);
            tr.total_adjustment_cost += sc.total();
        }
        // whole-window adjustment cost at the optimum (emergency excluded)
        WindowCost wc;
        for (int k = 0; k < v.len; ++k) {
            int t = v.w0 + k;
            DispatchPlan tmp = ex;
            tmp.p_gt[t] = sol.value(v.p_gt[k]);
            tmp.p_buy[t] = sol.value(v.p_buy[k]);
            tmp.p_sell[t] = sol.value(v.p_sell[k]);
            tmp.p_ess_ch[t] = sol.value(v.ess_ch[k]);
            tmp.p_ess_dis[t] = sol.value(v.ess_dis[k]);
            tmp.q_hp[t] = sol.value(v.q_hp[k]);
            tmp.h_hs_ch[t] = sol.value(v.hs_ch[k]);
            tmp.h_hs_dis[t] = sol.value(v.hs_dis[k]);
            for (size_t n = 0; n < in.envelopes.size(); ++n) {
                tmp.stations[n].schedule.p_ch[t] = sol.value(v.st_ch[n][k]);
                tmp.stations[n].schedule.p_dis[t] = sol.value(v.st_dis[n][k]);
            }
            WindowCost sc = step_adjustment(rc, in.reference, tmp, t, dt);
            wc.c_g += sc.c_g;
            wc.c_h += sc.c_h;
        }
        tr.window_costs.push_back(wc);

        st.step += n_exec;
    }
    return tr;
}

DeviationReport assess_deviation(const Profile& committed_pv,
                                 const Profile& committed_wt,
                                 const Profile& realized_pv_avail,
                                 const Profile& realized_wt_avail,
                                 double penalty_rate) {
    if (committed_pv.grid != realized_pv_avail.grid ||
        committed_wt.grid != realized_wt_avail.grid ||
        committed_pv.grid != committed_wt.grid)
        throw std::invalid_argument("assess_deviation: grid mismatch");
    if (penalty_rate < 0.0)
        throw std::invalid_argument("assess_deviation: negative penalty");
    const TimeGrid& g = committed_pv.grid;
    double dt = g.dt_hours();
    DeviationReport r;
    r.pv_shortage = Profile(g, Unit::kW);
    r.wind_shortage = Profile(g, Unit::kW);
    for (int t = 0; t < g.n_steps; ++t) {
        r.pv_shortage[t] = std::max(0.0, committed_pv[t] - realized_pv_avail[t]);
        r.wind_shortage[t] =
            std::max(0.0, committed_wt[t] - realized_wt_avail[t]);
        r.pv_cost += penalty_rate * r.pv_shortage[t] * dt;
        r.wind_cost += penalty_rate * r.wind_shortage[t] * dt;
    }
    return r;
}

}  // namespace menet

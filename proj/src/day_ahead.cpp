#include "menet/day_ahead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "menet/devices.hpp"
#include "menet/quantile.hpp"

namespace menet {

namespace {

// Fuel cost carrier: p_gt = p_min*u + sum(seg_k), fuel rate =
// gamma(p_min)*u + sum(slope_k*seg_k). Convex curves need no ordering
// binaries (cheapest slopes fill first under minimization); non-convex
// curves get the incremental ordering binaries tied to u.
struct FuelBlock {
    std::vector<int> segs;
    std::vector<double> slopes;
    double base_rate = 0.0;  // gamma(p_min)
};

FuelBlock add_fuel_block(MilpModel& m, const GasTurbineParams& g, int p_gt,
                         int u, double dt, const std::string& tag) {
    PwlCurve curve = gt_fuel_pwl(g);
    const auto& bp = curve.breakpoints;
    FuelBlock fb;
    fb.base_rate = bp.front().second;
    bool convex = pwl_is_convex(bp);
    std::vector<std::pair<int, double>> link{{p_gt, 1.0}, {u, -g.p_min}};
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        double w = bp[k + 1].first - bp[k].first;
        double slope = (bp[k + 1].second - bp[k].second) / w;
        int s = m.add_var(tag + "_seg" + std::to_string(k), 0.0, w,
                          VarType::Continuous, slope * dt);
        fb.segs.push_back(s);
        fb.slopes.push_back(slope);
        link.emplace_back(s, -1.0);
    }
    m.add_constr(tag + "_link", std::move(link), Sense::EQ, 0.0);
    m.add_obj(u, fb.base_rate * dt);
    if (!convex) {
        int prev_z = -1;
        for (size_t k = 0; k + 1 < fb.segs.size(); ++k) {
            int z = m.add_binary(tag + "_z" + std::to_string(k));
            double wk = bp[k + 1].first - bp[k].first;
            double wk1 = bp[k + 2].first - bp[k + 1].first;
            m.add_constr(tag + "_fill", {{fb.segs[k], 1.0}, {z, -wk}}, Sense::GE,
                         0.0);
            m.add_constr(tag + "_ord", {{fb.segs[k + 1], 1.0}, {z, -wk1}},
                         Sense::LE, 0.0);
            m.add_constr(tag + "_zu", {{z, 1.0}, {u, -1.0}}, Sense::LE, 0.0);
            prev_z = z;
        }
        (void)prev_z;
    }
    return fb;
}

double pwl_interp(const PwlCurve& c, double x) {
    const auto& bp = c.breakpoints;
    for (size_t k = 0; k + 1 < bp.size(); ++k)
        if (x <= bp[k + 1].first + 1e-9) {
            double w = bp[k + 1].first - bp[k].first;
            double a = (x - bp[k].first) / w;
            return bp[k].second + a * (bp[k + 1].second - bp[k].second);
        }
    return bp.back().second;
}

}  // namespace

Profile DispatchPlan::grid_exchange() const {
    Profile x(grid, Unit::kW);
    for (int t = 0; t < grid.n_steps; ++t) x[t] = p_buy[t] - p_sell[t];
    return x;
}

Profile reserve_requirement(const ScenarioConfig& cfg) {
    const TimeGrid& g = cfg.day_ahead_grid;
    Profile rho(g, Unit::kW);
    double q = std_normal_quantile(cfg.eta_confidence);
    for (int t = 0; t < g.n_steps; ++t) {
        double s_pv = cfg.pv.n_units * cfg.pv.unit_profile.sigma[t];
        double s_wt = cfg.wt.n_units * cfg.wt.unit_profile.sigma[t];
        rho[t] = q * std::sqrt(s_pv * s_pv + s_wt * s_wt);
    }
    return rho;
}

MilpModel build_day_ahead(const ScenarioConfig& cfg,
                          const std::vector<StationEnvelope>& envelopes,
                          bool dr_enabled, DayAheadVars& v) {
    const TimeGrid& g = cfg.day_ahead_grid;
    const int T = g.n_steps;
    if (T <= 0) throw std::invalid_argument("day_ahead: empty horizon");
    for (const auto& e : envelopes)
        if (e.grid != g)
            throw std::invalid_argument("day_ahead: envelope grid mismatch");
    const double dt = g.dt_hours();
    const GasTurbineParams& gt = cfg.gas_turbine;
    const BatteryParams& bat = cfg.battery;
    const HeatParams& heat = cfg.heat;

    Profile pv_avail = renewable_available(cfg.pv, cfg.pv.unit_profile.forecast);
    Profile wt_avail = renewable_available(cfg.wt, cfg.wt.unit_profile.forecast);
    Profile rho = reserve_requirement(cfg);

    MilpModel m;
    v = DayAheadVars{};
    v.st_ch.resize(envelopes.size());
    v.st_dis.resize(envelopes.size());
    v.st_soc.resize(envelopes.size());

    double buy_cap = std::max(0.0, cfg.grid_tie.p_max);
    double sell_cap = std::max(0.0, -cfg.grid_tie.p_min);

    for (int t = 0; t < T; ++t) {
        std::string s = std::to_string(t);
        v.u.push_back(m.add_binary("u" + s));
        v.su.push_back(m.add_var("su" + s, 0.0, 1.0, VarType::Continuous,
                                 gt.cost_up));
        v.sd.push_back(m.add_var("sd" + s, 0.0, 1.0, VarType::Continuous,
                                 gt.cost_down));
        v.p_gt.push_back(m.add_var("p_gt" + s, 0.0, gt.p_max,
                                   VarType::Continuous,
                                   gt.k_pollution * dt));
        v.p_buy.push_back(m.add_var("p_buy" + s, 0.0, buy_cap,
                                    VarType::Continuous,
                                    cfg.grid_tie.price_buy[t] * dt));
        v.p_sell.push_back(m.add_var("p_sell" + s, 0.0, sell_cap,
                                     VarType::Continuous,
                                     -cfg.grid_tie.price_sell[t] * dt));
        v.ess_ch.push_back(m.add_var("ess_ch" + s, 0.0, bat.p_rated,
                                     VarType::Continuous, bat.k_loss * dt));
        v.ess_dis.push_back(m.add_var("ess_dis" + s, 0.0, bat.p_rated,
                                      VarType::Continuous, bat.k_loss * dt));
        v.ess_soc.push_back(m.add_var("ess_soc" + s,
                                      bat.soc_min * bat.capacity,
                                      bat.soc_max * bat.capacity));
        v.q_hp.push_back(m.add_var("q_hp" + s, 0.0, heat.hp_q_max));
        v.hs_ch.push_back(
            m.add_var("hs_ch" + s, heat.hs_ch_min, heat.hs_ch_max));
        v.hs_dis.push_back(
            m.add_var("hs_dis" + s, heat.hs_dis_min, heat.hs_dis_max));
        v.hs_soc.push_back(m.add_var("hs_soc" + s, 0.0, heat.hs_capacity));
        v.pv_used.push_back(m.add_var("pv_used" + s, 0.0, pv_avail[t],
                                      VarType::Continuous, -cfg.lambda_cur * dt));
        v.wt_used.push_back(m.add_var("wt_used" + s, 0.0, wt_avail[t],
                                      VarType::Continuous, -cfg.lambda_cur * dt));
        for (size_t n = 0; n < envelopes.size(); ++n) {
            const StationEnvelope& e = envelopes[n];
            std::string tag = "st" + std::to_string(n) + "_" + s;
            v.st_ch[n].push_back(m.add_var(tag + "_ch", 0.0, e.p_ch_max[t],
                                           VarType::Continuous, cfg.c_evc * dt));
            v.st_dis[n].push_back(m.add_var(tag + "_dis", 0.0, e.p_dis_max[t],
                                            VarType::Continuous,
                                            cfg.c_evc * dt));
            v.st_soc[n].push_back(
                m.add_var(tag + "_soc", e.s_min[t], e.s_max[t]));
        }
        // DR decision variables; pinned to 0 when disabled or off-window
        double so_ub =
            dr_enabled && cfg.dr.is_peak(t)
                ? cfg.dr.shiftable_fraction_e * std::max(0.0, cfg.load_e[t])
                : 0.0;
        double si_ub =
            dr_enabled && cfg.dr.is_valley(t)
                ? cfg.dr.shiftable_fraction_e * std::max(0.0, cfg.load_e[t])
                : 0.0;
        v.shift_out.push_back(m.add_var("shift_out" + s, 0.0, so_ub));
        v.shift_in.push_back(m.add_var("shift_in" + s, 0.0, si_ub));
        v.cur_e.push_back(m.add_var("cur_e" + s, 0.0,
                                    dr_enabled ? cfg.dr.curtail_cap_e[t] : 0.0,
                                    VarType::Continuous,
                                    cfg.dr.lambda_e * dt));
        v.cur_h.push_back(m.add_var("cur_h" + s, 0.0,
                                    dr_enabled ? cfg.dr.curtail_cap_h[t] : 0.0,
                                    VarType::Continuous,
                                    cfg.dr.lambda_h * dt));
    }

    // renewable curtailment is priced as lambda_cur*(avail - used): the
    // constant part goes into the objective via the decode-side breakdown,
    // the variable part is the -lambda_cur*used coefficient above; add the
    // constant explicitly so the solver objective equals the full bill
    double cur_const = 0.0;
    for (int t = 0; t < T; ++t) cur_const += (pv_avail[t] + wt_avail[t]) * dt;
    // constant offsets are not representable in MilpModel; keep the model
    // objective shifted and reconcile in recompute_costs instead
    (void)cur_const;

    for (int t = 0; t < T; ++t) {
        std::string s = std::to_string(t);
        // GT commitment window and start/stop logic (initial state: off)
        m.add_constr("gt_lo" + s, {{v.p_gt[t], 1.0}, {v.u[t], -gt.p_min}},
                     Sense::GE, 0.0);
        m.add_constr("gt_hi" + s, {{v.p_gt[t], 1.0}, {v.u[t], -gt.p_max}},
                     Sense::LE, 0.0);
        if (t == 0)
            m.add_constr("gt_commit0",
                         {{v.u[0], 1.0}, {v.su[0], -1.0}, {v.sd[0], 1.0}},
                         Sense::EQ, 0.0);
        else
            m.add_constr("gt_commit" + s,
                         {{v.u[t], 1.0},
                          {v.u[t - 1], -1.0},
                          {v.su[t], -1.0},
                          {v.sd[t], 1.0}},
                         Sense::EQ, 0.0);
        // ramps with a p_min allowance on start/stop transitions
        if (t == 0) {
            m.add_constr("gt_rup0",
                         {{v.p_gt[0], 1.0}, {v.su[0], -gt.p_min}}, Sense::LE,
                         gt.ramp_up);
        } else {
            m.add_constr("gt_rup" + s,
                         {{v.p_gt[t], 1.0},
                          {v.p_gt[t - 1], -1.0},
                          {v.su[t], -gt.p_min}},
                         Sense::LE, gt.ramp_up);
            m.add_constr("gt_rdn" + s,
                         {{v.p_gt[t - 1], 1.0},
                          {v.p_gt[t], -1.0},
                          {v.sd[t], -gt.p_min}},
                         Sense::LE, gt.ramp_down);
        }

        // battery SOC recursion and cyclic terminal
        {
            std::vector<std::pair<int, double>> terms{
                {v.ess_soc[t], 1.0},
                {v.ess_ch[t], -bat.eta_ch * dt},
                {v.ess_dis[t], dt / bat.eta_dis}};
            double rhs = 0.0;
            if (t == 0)
                rhs = bat.soc_start * bat.capacity;
            else
                terms.emplace_back(v.ess_soc[t - 1], -1.0);
            m.add_constr("ess_rec" + s, std::move(terms), Sense::EQ, rhs);
        }
        // heat storage recursion (unit efficiency) and corridor
        {
            std::vector<std::pair<int, double>> terms{{v.hs_soc[t], 1.0},
                                                      {v.hs_ch[t], -dt},
                                                      {v.hs_dis[t], dt}};
            double rhs = 0.0;
            if (t == 0)
                rhs = heat.hs_soc_start * heat.hs_capacity;
            else
                terms.emplace_back(v.hs_soc[t - 1], -1.0);
            m.add_constr("hs_rec" + s, std::move(terms), Sense::EQ, rhs);
        }
        // station SOC recursions with boundary injections
        for (size_t n = 0; n < envelopes.size(); ++n) {
            const StationEnvelope& e = envelopes[n];
            std::vector<std::pair<int, double>> terms{
                {v.st_soc[n][t], 1.0},
                {v.st_ch[n][t], -e.eta_ch * dt},
                {v.st_dis[n][t], e.eta_ref * dt / e.eta_dis}};
            double rhs = e.delta_s[t];
            if (t > 0) terms.emplace_back(v.st_soc[n][t - 1], -1.0);
            m.add_constr("st" + std::to_string(n) + "_rec" + s,
                         std::move(terms), Sense::EQ, rhs);
        }

        // electric balance with the chance-constraint reserve on the rhs:
        // supply - demand == quantile(eta) * sigma_total(t)
        {
            std::vector<std::pair<int, double>> terms{
                {v.p_gt[t], 1.0},        {v.p_buy[t], 1.0},
                {v.p_sell[t], -1.0},     {v.ess_dis[t], 1.0},
                {v.ess_ch[t], -1.0},     {v.pv_used[t], 1.0},
                {v.wt_used[t], 1.0},     {v.q_hp[t], -1.0 / heat.hp_cop},
                {v.shift_out[t], 1.0},   {v.shift_in[t], -1.0},
                {v.cur_e[t], 1.0}};
            for (size_t n = 0; n < envelopes.size(); ++n) {
                terms.emplace_back(v.st_dis[n][t], 1.0);
                terms.emplace_back(v.st_ch[n][t], -1.0);
            }
            m.add_constr("ebal" + s, std::move(terms), Sense::EQ,
                         cfg.load_e[t] + rho[t]);
        }
        // thermal balance
        m.add_constr("hbal" + s,
                     {{v.q_hp[t], 1.0},
                      {v.hs_dis[t], 1.0},
                      {v.hs_ch[t], -1.0},
                      {v.cur_h[t], 1.0}},
                     Sense::EQ, cfg.load_h[t]);
    }
    // cyclic storage
    m.add_constr("ess_cyc", {{v.ess_soc[T - 1], 1.0}}, Sense::EQ,
                 bat.soc_start * bat.capacity);
    m.add_constr("hs_cyc", {{v.hs_soc[T - 1], 1.0}}, Sense::EQ,
                 heat.hs_soc_start * heat.hs_capacity);
    // energy-neutral load shifting over the whole day
    if (dr_enabled) {
        std::vector<std::pair<int, double>> bal;
        for (int t = 0; t < T; ++t) {
            bal.emplace_back(v.shift_in[t], 1.0);
            bal.emplace_back(v.shift_out[t], -1.0);
        }
        m.add_constr("shift_balance", std::move(bal), Sense::EQ, 0.0);
    }
    // fuel blocks last so segment variables sit after the core block
    for (int t = 0; t < T; ++t)
        add_fuel_block(m, gt, v.p_gt[t], v.u[t], dt,
                       "fuel" + std::to_string(t));
    return m;
}

PeakValley peak_valley_metric(const Profile& x) {
    if (x.size() == 0) throw std::invalid_argument("peak_valley: empty profile");
    PeakValley pv;
    pv.peak = x.max_value();
    pv.valley = x.min_value();
    pv.difference = pv.peak - pv.valley;
    return pv;
}

CostBreakdown recompute_costs(const ScenarioConfig& cfg, const DispatchPlan& p,
                              double solver_objective) {
    const TimeGrid& g = p.grid;
    const double dt = g.dt_hours();
    PwlCurve curve = gt_fuel_pwl(cfg.gas_turbine);
    Profile pv_avail =
        renewable_available(cfg.pv, cfg.pv.unit_profile.forecast);
    Profile wt_avail =
        renewable_available(cfg.wt, cfg.wt.unit_profile.forecast);

    CostBreakdown c;
    for (int t = 0; t < g.n_steps; ++t) {
        if (p.gt_on[static_cast<size_t>(t)])
            c.c_g += pwl_interp(curve, p.p_gt[t]) * dt;
        c.c_g += cfg.gas_turbine.cost_up * p.gt_start[static_cast<size_t>(t)] +
                 cfg.gas_turbine.cost_down * p.gt_stop[static_cast<size_t>(t)];
        c.c_pollu += cfg.gas_turbine.k_pollution * p.p_gt[t] * dt;
        c.c_gird += (cfg.grid_tie.price_buy[t] * p.p_buy[t] -
                     cfg.grid_tie.price_sell[t] * p.p_sell[t]) *
                    dt;
        c.c_ess += cfg.battery.k_loss * (p.p_ess_ch[t] + p.p_ess_dis[t]) * dt;
        for (const auto& st : p.stations)
            c.c_evc += cfg.c_evc *
                       (st.schedule.p_ch[t] + st.schedule.p_dis[t]) * dt;
        c.c_cur += cfg.lambda_cur *
                   (pv_avail[t] - p.p_pv_used[t] + wt_avail[t] -
                    p.p_wt_used[t]) *
                   dt;
    }
    c.c_dr = dr_cost(p.dr, cfg.dr);
    c.total = c.sum_parts();

    // solver objective omits the constant lambda_cur * available term
    double cur_const = cfg.lambda_cur * (pv_avail.energy() + wt_avail.energy());
    double shifted = solver_objective + cur_const;
    double tol = 1e-6 * std::max(1.0, std::abs(c.total));
    if (std::abs(shifted - c.total) > tol)
        throw std::runtime_error("day_ahead: cost breakdown disagrees with "
                                 "solver objective");
    return c;
}

namespace {

DispatchPlan decode_plan(const ScenarioConfig& cfg,
                         const std::vector<StationEnvelope>& envelopes,
                         const DayAheadVars& v, const Solution& sol) {
    const TimeGrid& g = cfg.day_ahead_grid;
    const int T = g.n_steps;
    DispatchPlan p;
    p.grid = g;
    auto prof = [&](const std::vector<int>& idx) {
        Profile out(g, Unit::kW);
        for (int t = 0; t < T; ++t) out[t] = sol.value(idx[static_cast<size_t>(t)]);
        return out;
    };
    p.p_gt = prof(v.p_gt);
    p.p_buy = prof(v.p_buy);
    p.p_sell = prof(v.p_sell);
    p.p_ess_ch = prof(v.ess_ch);
    p.p_ess_dis = prof(v.ess_dis);
    p.ess_soc = prof(v.ess_soc);
    p.ess_soc.unit = Unit::kWh;
    p.q_hp = prof(v.q_hp);
    p.h_hs_ch = prof(v.hs_ch);
    p.h_hs_dis = prof(v.hs_dis);
    p.hs_soc = prof(v.hs_soc);
    p.hs_soc.unit = Unit::kWh;
    p.p_pv_used = prof(v.pv_used);
    p.p_wt_used = prof(v.wt_used);
    p.p_hp = Profile(g, Unit::kW);
    p.reserve = reserve_requirement(cfg);
    Profile pv_avail =
        renewable_available(cfg.pv, cfg.pv.unit_profile.forecast);
    Profile wt_avail =
        renewable_available(cfg.wt, cfg.wt.unit_profile.forecast);
    p.p_curtailed = Profile(g, Unit::kW);
    for (int t = 0; t < T; ++t) {
        p.p_hp[t] = p.q_hp[t] / cfg.heat.hp_cop;
        p.p_curtailed[t] =
            pv_avail[t] - p.p_pv_used[t] + wt_avail[t] - p.p_wt_used[t];
    }
    for (int t = 0; t < T; ++t) {
        p.gt_on.push_back(sol.value(v.u[static_cast<size_t>(t)]) > 0.5 ? 1 : 0);
        p.gt_start.push_back(
            sol.value(v.su[static_cast<size_t>(t)]) > 0.5 ? 1 : 0);
        p.gt_stop.push_back(sol.value(v.sd[static_cast<size_t>(t)]) > 0.5 ? 1
                                                                          : 0);
    }
    // heat-storage wash cycles are objective-neutral at unit efficiency;
    // canonicalize so the exclusivity invariant holds
    if (cfg.heat.hs_ch_min == 0.0 && cfg.heat.hs_dis_min == 0.0)
        for (int t = 0; t < T; ++t) {
            double w = std::min(p.h_hs_ch[t], p.h_hs_dis[t]);
            p.h_hs_ch[t] -= w;
            p.h_hs_dis[t] -= w;
        }
    for (size_t n = 0; n < envelopes.size(); ++n) {
        StationDispatch sd;
        sd.station_id = envelopes[n].station_id;
        sd.schedule.p_ch = prof(v.st_ch[n]);
        sd.schedule.p_dis = prof(v.st_dis[n]);
        sd.schedule.soc = prof(v.st_soc[n]);
        sd.schedule.soc.unit = Unit::kWh;
        p.stations.push_back(std::move(sd));
    }
    p.dr = DrDecision::zero(g);
    for (int t = 0; t < T; ++t) {
        p.dr.shift_in[t] = sol.value(v.shift_in[static_cast<size_t>(t)]);
        p.dr.shift_out[t] = sol.value(v.shift_out[static_cast<size_t>(t)]);
        p.dr.curtail_e[t] = sol.value(v.cur_e[static_cast<size_t>(t)]);
        p.dr.curtail_h[t] = sol.value(v.cur_h[static_cast<size_t>(t)]);
    }
    return p;
}

std::string diagnose_infeasible(const MilpModel& base) {
    MilpModel m = base;
    // relax binaries so the diagnosis concerns the physical balances
    std::vector<int> slack_of_row;
    MilpModel elastic;
    for (int i = 0; i < m.n_vars(); ++i) {
        const Variable& var = m.var(i);
        elastic.add_var(var.name, var.lb, var.ub, VarType::Continuous, var.obj);
    }
    for (int r = 0; r < m.n_constrs(); ++r) {
        const Constraint& c = m.constr(r);
        auto terms = c.terms;
        bool balance = c.name.rfind("ebal", 0) == 0 ||
                       c.name.rfind("hbal", 0) == 0;
        if (balance) {
            int sp = elastic.add_var(c.name + "_sp", 0.0, kInf,
                                     VarType::Continuous, 1e6);
            int sn = elastic.add_var(c.name + "_sn", 0.0, kInf,
                                     VarType::Continuous, 1e6);
            terms.emplace_back(sp, 1.0);
            terms.emplace_back(sn, -1.0);
            slack_of_row.push_back(sp);
            slack_of_row.push_back(sn);
        }
        elastic.add_constr(c.name, std::move(terms), c.sense, c.rhs);
    }
    Solution s = solve(elastic);
    if (!s.optimal()) return "infeasible beyond the balance constraints";
    for (int r = 0; r < elastic.n_constrs(); ++r) {
        const Constraint& c = elastic.constr(r);
        if (c.name.rfind("ebal", 0) != 0 && c.name.rfind("hbal", 0) != 0)
            continue;
        double gap = 0.0;
        for (auto [var, coef] : c.terms) {
            const std::string& nm = elastic.var(var).name;
            if (nm.size() > 3 && (nm.rfind("_sp") == nm.size() - 3 ||
                                  nm.rfind("_sn") == nm.size() - 3))
                gap += std::abs(s.value(var));
        }
        if (gap > 1e-6)
            return "first violated balance: " + c.name + " (shortfall " +
                   std::to_string(gap) + " kW)";
    }
    return "infeasible with no balance shortfall identified";
}

// Sum of greedy per-session charge-asap SOC paths: a decomposable,
// aggregate-feasible witness. Flooring the tightened corridor at this
// trajectory keeps the repaired model feasible by construction.
Profile witness_soc(const TimeGrid& g, const std::vector<EvSession>& fleet) {
    Profile w(g, Unit::kWh);
    double dt = g.dt_hours();
    for (const auto& s : fleet) {
        double soc = s.soc_arrive;
        for (int t = s.t_arrive; t <= s.t_leave; ++t) {
            double p = std::clamp((s.soc_leave - soc) / (s.eta_ch * dt), 0.0,
                                  s.p_ch_max);
            soc += s.eta_ch * p * dt;
            w[t] += soc;
        }
    }
    return w;
}

// Tighten the summed SOC corridor to each session's forward-reachable and
// backward-controllable band. Every per-session feasible trajectory lies
// inside its band, so the summed schedule set only sheds aggregate points
// that no decomposition could realize (cross-window energy transfers).
void refine_envelope(StationEnvelope& env, const std::vector<EvSession>& fleet) {
    const TimeGrid& g = env.grid;
    double dt = g.dt_hours();
    Profile lb(g, Unit::kWh), ub(g, Unit::kWh);
    for (const auto& s : fleet) {
        for (int t = s.t_arrive; t <= s.t_leave; ++t) {
            double k1 = (t - s.t_arrive + 1) * dt;
            double k2 = (s.t_leave - t) * dt;
            double hi = std::min({s.soc_max,
                                  s.soc_arrive + s.eta_ch * s.p_ch_max * k1,
                                  s.soc_leave +
                                      s.eta_ref * s.p_dis_max * k2 / s.eta_dis});
            double lo = std::max(
                {s.soc_min,
                 s.soc_arrive - s.eta_ref * s.p_dis_max * k1 / s.eta_dis,
                 s.soc_leave - s.eta_ch * s.p_ch_max * k2});
            ub[t] += hi;
            lb[t] += std::min(lo, hi);
        }
    }
    for (int t = 0; t < g.n_steps; ++t) {
        env.s_max[t] = std::min(env.s_max[t], ub[t]);
        env.s_min[t] = std::max(env.s_min[t], lb[t]);
    }
}

}  // namespace

DayAheadResult solve_day_ahead(const ScenarioConfig& cfg,
                               std::vector<StationEnvelope> envelopes,
                               bool dr_enabled,
                               const std::vector<std::vector<EvSession>>& fleets) {
    DayAheadResult res;
    for (size_t n = 0; n < fleets.size() && n < envelopes.size(); ++n)
        refine_envelope(envelopes[n], fleets[n]);
    for (int iter = 0; iter <= 3; ++iter) {
        DayAheadVars v;
        MilpModel m = build_day_ahead(cfg, envelopes, dr_enabled, v);
        Solution sol = solve(m);
        res.status = sol.status;
        if (sol.status != SolveStatus::Optimal) {
            if (sol.status == SolveStatus::Infeasible)
                res.diagnosis = diagnose_infeasible(m);
            return res;
        }
        res.plan = decode_plan(cfg, envelopes, v, sol);
        res.plan.costs = recompute_costs(cfg, res.plan, sol.objective);
        if (fleets.empty() || iter == 3) return res;

        bool all_ok = true;
        for (size_t n = 0; n < envelopes.size(); ++n) {
            DisaggregationResult d = disaggregate(
                envelopes[n], res.plan.stations[n].schedule, fleets[n]);
            if (!d.decomposable) {
                all_ok = false;
                double gap = std::min(d.gap_kwh, 1e6);
                Profile w = witness_soc(envelopes[n].grid, fleets[n]);
                for (int t = 0; t < envelopes[n].grid.n_steps; ++t)
                    envelopes[n].s_max[t] = std::max(
                        {envelopes[n].s_min[t], w[t],
                         envelopes[n].s_max[t] - gap});
            }
        }
        if (all_ok) return res;
        ++res.repair_iterations;
    }
    return res;
}

}  // namespace menet

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "menet/day_ahead.hpp"
#include "menet/intraday.hpp"
#include "toy_scenario.hpp"

using namespace menet;

TEST_CASE("rolling config maps the scenario and validates") {
    ScenarioConfig cfg = rich_toy_scenario();
    cfg.grid_tie.sigma_gird = 0.25;
    RollingConfig rc = RollingConfig::from_scenario(cfg);
    CHECK(rc.window_steps == cfg.window_steps);
    CHECK(rc.execute_steps == cfg.execute_steps);
    CHECK(rc.sigma_ess == cfg.sigma_ess);
    CHECK(rc.sigma_gt == cfg.sigma_gt);
    CHECK(rc.sigma_gird == 0.25);
    CHECK(rc.c_evc == cfg.c_evc);
    CHECK(rc.sigma_hs == cfg.heat.sigma_hs);
    CHECK(rc.sigma_hp == cfg.heat.sigma_hp);
    rc.validate();

    RollingConfig bad = rc;
    bad.execute_steps = bad.window_steps + 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = rc;
    bad.sigma_gt = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("session expansion keeps whole-hour windows and energies") {
    TimeGrid da{0.0, 60, 4}, id{0.0, 15, 16};
    EvSession s;
    s.id = "ev1";
    s.station_id = "st";
    s.t_arrive = 1;
    s.t_leave = 2;
    s.soc_arrive = 10.0;
    s.soc_leave = 14.0;
    s.soc_max = 20.0;
    s.p_ch_max = 5.0;
    s.p_dis_max = 5.0;
    auto out = expand_sessions({s}, da, id);
    REQUIRE(out.size() == 1);
    CHECK(out[0].t_arrive == 4);
    CHECK(out[0].t_leave == 11);
    CHECK(out[0].soc_arrive == 10.0);
    CHECK(out[0].soc_leave == 14.0);
    CHECK(out[0].p_ch_max == 5.0);
    out[0].validate(id);

    TimeGrid other{0.0, 60, 8};
    CHECK_THROWS_AS(expand_sessions({s}, da, other), std::invalid_argument);
}

TEST_CASE("perfect forecasts reproduce the day-ahead plan exactly") {
    ScenarioConfig cfg = rich_toy_scenario();
    for (auto& s : cfg.pv.unit_profile.sigma.values) s = 0.0;
    cfg.intraday_sigma_frac = 0.0;

    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    IntradayInputs in = prepare_intraday(cfg, r.plan);
    RollingConfig rc = RollingConfig::from_scenario(cfg);
    ExecutionTrace tr = roll(rc, cfg, r.plan, 5);

    CHECK(tr.total_adjustment_cost <= 1e-6);
    CHECK(tr.emergency.empty());
    const DispatchPlan& ex = tr.executed;
    const DispatchPlan& ref = in.reference;
    for (int t = 0; t < cfg.intra_day_grid.n_steps; ++t) {
        CHECK(ex.p_gt[t] == doctest::Approx(ref.p_gt[t]).epsilon(1e-6));
        CHECK(ex.p_buy[t] - ex.p_sell[t] ==
              doctest::Approx(ref.p_buy[t] - ref.p_sell[t]).epsilon(1e-6));
        CHECK(ex.p_ess_ch[t] == doctest::Approx(ref.p_ess_ch[t]).epsilon(1e-6));
        CHECK(ex.p_ess_dis[t] == doctest::Approx(ref.p_ess_dis[t]).epsilon(1e-6));
        CHECK(ex.q_hp[t] == doctest::Approx(ref.q_hp[t]).epsilon(1e-6));
        CHECK(ex.h_hs_ch[t] == doctest::Approx(ref.h_hs_ch[t]).epsilon(1e-6));
        CHECK(ex.h_hs_dis[t] == doctest::Approx(ref.h_hs_dis[t]).epsilon(1e-6));
        CHECK(ex.p_pv_used[t] == doctest::Approx(ref.p_pv_used[t]).epsilon(1e-6));
    }
}

TEST_CASE("a renewable shortfall is repriced through the only free device") {
    // Turbine stays off in the reference, storage is absent: a 20 kW PV dip
    // at the executed step must flow through the tie line at sigma_gird.
    ScenarioConfig cfg = toy_scenario();
    cfg.pv.n_units = 1;
    for (auto& f : cfg.pv.unit_profile.forecast.values) f = 80.0;
    cfg.grid_tie.sigma_gird = 1.0;

    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    IntradayInputs in = prepare_intraday(cfg, r.plan);
    RollingConfig rc = RollingConfig::from_scenario(cfg);

    SystemState st;
    st.ess_soc = cfg.battery.soc_start * cfg.battery.capacity;
    st.hs_soc = cfg.heat.hs_soc_start * cfg.heat.hs_capacity;

    Profile avail = resample(
        renewable_available(cfg.pv, cfg.pv.unit_profile.forecast),
        cfg.intra_day_grid);
    Profile fresh_pv = avail;
    fresh_pv[0] -= 20.0;
    Profile fresh_wt(cfg.intra_day_grid, Unit::kW);

    WindowVars v;
    MilpModel m = build_window_model(rc, cfg, in, st, fresh_pv, fresh_wt, v);
    Solution sol = solve(m);
    REQUIRE(sol.optimal());

    double dt = cfg.intra_day_grid.dt_hours();
    double ref_net = in.reference.p_buy[0] - in.reference.p_sell[0];
    double net = sol.value(v.p_buy[0]) - sol.value(v.p_sell[0]);
    CHECK(net - ref_net == doctest::Approx(20.0).epsilon(1e-6));

    // objective = grid deviation + the tiny renewable-usage tie-break price
    double used = 0.0;
    for (int k = 0; k < v.len; ++k)
        used += sol.value(v.pv_used[k]) + sol.value(v.wt_used[k]);
    double expect = 1.0 * 20.0 * dt + 1e-4 * dt * used;
    CHECK(sol.objective == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("noisy rolling execution keeps every physical invariant") {
    ScenarioConfig cfg = rich_toy_scenario();
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    IntradayInputs in = prepare_intraday(cfg, r.plan);
    RollingConfig rc = RollingConfig::from_scenario(cfg);
    ExecutionTrace tr = roll(rc, cfg, r.plan, 2);

    const DispatchPlan& ex = tr.executed;
    const TimeGrid& g = cfg.intra_day_grid;
    const double dt = g.dt_hours();
    CHECK(tr.emergency.empty());

    double soc = cfg.battery.soc_start * cfg.battery.capacity;
    double hs = cfg.heat.hs_soc_start * cfg.heat.hs_capacity;
    for (int t = 0; t < g.n_steps; ++t) {
        // electric balance carries the inherited reserve margin
        double lhs = ex.p_gt[t] + ex.p_buy[t] - ex.p_sell[t] +
                     ex.p_pv_used[t] + ex.p_wt_used[t] + ex.p_ess_dis[t] -
                     ex.p_ess_ch[t] - ex.p_hp[t];
        CHECK(lhs - in.load_e_eff[t] ==
              doctest::Approx(in.reserve[t]).epsilon(1e-6));
        CHECK(ex.q_hp[t] + ex.h_hs_dis[t] - ex.h_hs_ch[t] ==
              doctest::Approx(in.load_h_eff[t]).epsilon(1e-6));
        // canonical dispatch: no simultaneous charge/discharge or buy/sell
        CHECK(ex.p_ess_ch[t] * ex.p_ess_dis[t] == 0.0);
        CHECK(ex.h_hs_ch[t] * ex.h_hs_dis[t] == 0.0);
        CHECK(ex.p_buy[t] * ex.p_sell[t] == 0.0);
        // usage never exceeds the realized availability
        CHECK(ex.p_pv_used[t] <= tr.pv_avail_realized[t] + 1e-6);
        CHECK(ex.p_wt_used[t] <= tr.wt_avail_realized[t] + 1e-6);
        CHECK(ex.p_curtailed[t] ==
              doctest::Approx(tr.pv_avail_realized[t] - ex.p_pv_used[t] +
                              tr.wt_avail_realized[t] - ex.p_wt_used[t])
                  .epsilon(1e-6));
        // storage recursions and corridors
        soc += dt * (cfg.battery.eta_ch * ex.p_ess_ch[t] -
                     ex.p_ess_dis[t] / cfg.battery.eta_dis);
        CHECK(ex.ess_soc[t] == doctest::Approx(soc).epsilon(1e-6));
        CHECK(soc >= cfg.battery.soc_min * cfg.battery.capacity - 1e-6);
        CHECK(soc <= cfg.battery.soc_max * cfg.battery.capacity + 1e-6);
        hs += dt * (ex.h_hs_ch[t] - ex.h_hs_dis[t]);
        CHECK(ex.hs_soc[t] == doctest::Approx(hs).epsilon(1e-6));
        // turbine ramping between committed steps
        if (t > 0 && in.gt_commit[(size_t)t] && in.gt_commit[(size_t)t - 1]) {
            CHECK(ex.p_gt[t] - ex.p_gt[t - 1] <=
                  cfg.gas_turbine.ramp_up + 1e-6);
            CHECK(ex.p_gt[t - 1] - ex.p_gt[t] <=
                  cfg.gas_turbine.ramp_down + 1e-6);
        }
    }
    // terminal anchoring returns storage to the day-ahead end state
    const int T = g.n_steps;
    CHECK(ex.ess_soc[T - 1] ==
          doctest::Approx(in.reference.ess_soc[T - 1]).epsilon(1e-6));
    CHECK(ex.hs_soc[T - 1] ==
          doctest::Approx(in.reference.hs_soc[T - 1]).epsilon(1e-6));

    // strategy 2 commits what it executed: no shortage, no penalty
    DeviationReport two =
        assess_deviation(ex.p_pv_used, ex.p_wt_used, tr.pv_avail_realized,
                         tr.wt_avail_realized, cfg.penalty_rate);
    CHECK(two.total() == 0.0);
    // strategy 1 committed the day-ahead forecast and pays for the dips
    DeviationReport one = assess_deviation(
        in.reference.p_pv_used, in.reference.p_wt_used, tr.pv_avail_realized,
        tr.wt_avail_realized, cfg.penalty_rate);
    CHECK(one.total() > 0.0);
    CHECK(tr.total_adjustment_cost > 0.0);
    CHECK(tr.window_costs.size() == (size_t)g.n_steps);
}

TEST_CASE("whole-horizon window behaves like a single re-dispatch") {
    ScenarioConfig cfg = rich_toy_scenario();
    cfg.window_steps = cfg.intra_day_grid.n_steps;
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    RollingConfig rc = RollingConfig::from_scenario(cfg);
    ExecutionTrace tr = roll(rc, cfg, r.plan, 2);
    CHECK(tr.emergency.empty());
    const int T = cfg.intra_day_grid.n_steps;
    IntradayInputs in = prepare_intraday(cfg, r.plan);
    CHECK(tr.executed.ess_soc[T - 1] ==
          doctest::Approx(in.reference.ess_soc[T - 1]).epsilon(1e-6));
}

TEST_CASE("deviation assessment bills only the shortage side") {
    TimeGrid g{0.0, 15, 4};
    Profile cpv(g, Unit::kW, {10, 10, 10, 10});
    Profile cwt(g, Unit::kW, {5, 5, 5, 5});
    Profile rpv(g, Unit::kW, {12, 8, 10, 6});
    Profile rwt(g, Unit::kW, {5, 5, 7, 5});
    DeviationReport rep = assess_deviation(cpv, cwt, rpv, rwt, 0.6);
    CHECK(rep.pv_shortage[0] == 0.0);
    CHECK(rep.pv_shortage[1] == doctest::Approx(2.0));
    CHECK(rep.pv_shortage[3] == doctest::Approx(4.0));
    CHECK(rep.wind_shortage.max_value() == 0.0);
    CHECK(rep.pv_cost == doctest::Approx(0.6 * 6.0 * 0.25).epsilon(1e-9));
    CHECK(rep.wind_cost == 0.0);
    CHECK(rep.total() == doctest::Approx(rep.pv_cost).epsilon(1e-12));

    TimeGrid other{0.0, 60, 4};
    Profile bad(other, Unit::kW, 10.0);
    CHECK_THROWS_AS(assess_deviation(bad, cwt, rpv, rwt, 0.6),
                    std::invalid_argument);
    CHECK_THROWS_AS(assess_deviation(cpv, cwt, rpv, rwt, -0.1),
                    std::invalid_argument);
}

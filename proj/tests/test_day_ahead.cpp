#include <cmath>
#include <vector>

#include "doctest.h"
#include "menet/day_ahead.hpp"
#include "menet/quantile.hpp"
#include "toy_scenario.hpp"

using namespace menet;

namespace {

// Electric supply-minus-demand residual of a decoded plan at step t; the
// scheduled reserve margin when the balance row held.
double supply_margin(const ScenarioConfig& cfg, const DispatchPlan& p, int t) {
    auto [le, lh] = effective_loads(cfg.load_e, cfg.load_h, p.dr);
    double station = 0.0;
    for (const auto& st : p.stations)
        station += st.schedule.p_ch[t] - st.schedule.p_dis[t];
    return p.p_gt[t] + p.p_buy[t] - p.p_sell[t] + p.p_pv_used[t] +
           p.p_wt_used[t] + p.p_ess_dis[t] - p.p_ess_ch[t] - p.p_hp[t] -
           station - le[t];
}

}  // namespace

TEST_CASE("reserve requirement matches the closed form") {
    ScenarioConfig cfg = toy_scenario();
    cfg.pv.n_units = 1;
    cfg.wt.n_units = 1;
    for (auto& s : cfg.pv.unit_profile.sigma.values) s = 6.0;
    for (auto& s : cfg.wt.unit_profile.sigma.values) s = 8.0;

    Profile rho = reserve_requirement(cfg);
    double expect = std_normal_quantile(0.95) * 10.0;
    for (int t = 0; t < rho.size(); ++t) {
        CHECK(rho[t] == doctest::Approx(expect).epsilon(1e-9));
        CHECK(rho[t] == doctest::Approx(16.4485363).epsilon(1e-6));
    }

    // confidence near one half asks for (almost) no margin
    cfg.eta_confidence = 0.5 + 1e-12;
    CHECK(reserve_requirement(cfg)[0] == doctest::Approx(0.0).epsilon(1e-6));

    // n_units scales the per-unit deviation
    cfg.eta_confidence = 0.95;
    cfg.wt.n_units = 0;
    cfg.pv.n_units = 3;
    CHECK(reserve_requirement(cfg)[0] ==
          doctest::Approx(std_normal_quantile(0.95) * 18.0).epsilon(1e-9));

    // zero sigma means a pure equality balance
    for (auto& s : cfg.pv.unit_profile.sigma.values) s = 0.0;
    CHECK(reserve_requirement(cfg).max_value() == 0.0);
}

TEST_CASE("reserve is scheduled as a supply margin in the balance") {
    ScenarioConfig cfg = toy_scenario();
    cfg.pv.n_units = 1;
    cfg.wt.n_units = 1;
    for (auto& s : cfg.pv.unit_profile.sigma.values) s = 6.0;
    for (auto& s : cfg.wt.unit_profile.sigma.values) s = 8.0;

    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    Profile rho = reserve_requirement(cfg);
    for (int t = 0; t < cfg.day_ahead_grid.n_steps; ++t) {
        CHECK(r.plan.reserve[t] == doctest::Approx(rho[t]).epsilon(1e-9));
        CHECK(supply_margin(cfg, r.plan, t) ==
              doctest::Approx(rho[t]).epsilon(1e-6));
    }
}

TEST_CASE("hand-solved single-turbine day") {
    // Flat 50 kW load, affine fuel 0.5*P+2, buy at 1.0, sell at 0.2: running
    // the turbine at the load for four hours plus one start is optimal.
    ScenarioConfig cfg = toy_scenario();
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    double expect = 4.0 * (0.5 * 50.0 + 2.0) + 5.0;
    CHECK(r.plan.costs.total == doctest::Approx(expect).epsilon(1e-7));
    for (int t = 0; t < 4; ++t) {
        CHECK(r.plan.p_gt[t] == doctest::Approx(50.0).epsilon(1e-7));
        CHECK(r.plan.p_buy[t] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(r.plan.gt_on[t] == 1);
    }
    CHECK(r.plan.gt_start[0] == 1);
}

TEST_CASE("free renewables displace purchases and the turbine") {
    ScenarioConfig cfg = toy_scenario();
    cfg.pv.n_units = 1;
    for (auto& f : cfg.pv.unit_profile.forecast.values) f = 80.0;
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    for (int t = 0; t < 4; ++t) {
        CHECK(r.plan.p_buy[t] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(r.plan.p_gt[t] == doctest::Approx(0.0).epsilon(1e-9));
        // the 30 kW surplus is worth more sold than curtailed
        CHECK(r.plan.p_sell[t] == doctest::Approx(30.0).epsilon(1e-6));
    }
    CHECK(r.plan.costs.total == doctest::Approx(-0.2 * 30.0 * 4).epsilon(1e-6));
}

TEST_CASE("infeasibility diagnosis names the broken balance") {
    ScenarioConfig cfg = toy_scenario();
    cfg.grid_tie.p_max = 10.0;
    cfg.load_e = Profile(cfg.day_ahead_grid, Unit::kW, 5000.0);
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    CHECK(r.status == SolveStatus::Infeasible);
    CHECK(r.diagnosis.find("ebal") != std::string::npos);
}

TEST_CASE("demand response: disabled is inert, enabled only helps") {
    ScenarioConfig cfg = toy_scenario();
    cfg.dr.curtail_cap_e = Profile(cfg.day_ahead_grid, Unit::kW, 20.0);
    cfg.dr.lambda_e = 0.3;  // cheaper than the turbine's marginal 0.5

    DayAheadResult off = solve_day_ahead(cfg, {}, false);
    REQUIRE(off.status == SolveStatus::Optimal);
    CHECK(off.plan.dr.curtail_e.max_value() == 0.0);
    CHECK(off.plan.dr.shift_out.max_value() == 0.0);

    DayAheadResult on = solve_day_ahead(cfg, {}, true);
    REQUIRE(on.status == SolveStatus::Optimal);
    CHECK(on.plan.costs.total <= off.plan.costs.total + 1e-9);
    // full curtailment: 4*(0.5*30+2) + 5 start + 0.3*20*4 compensation
    double expect = 4.0 * 17.0 + 5.0 + 24.0;
    CHECK(on.plan.costs.total == doctest::Approx(expect).epsilon(1e-7));
}

TEST_CASE("four-step lattice enumeration never beats the solver") {
    ScenarioConfig cfg = toy_scenario();
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);

    const GasTurbineParams& g = cfg.gas_turbine;
    std::vector<double> levels = {0.0};
    for (int k = 0; k <= 9; ++k) levels.push_back(g.p_min + 10.0 * k);

    double best = 1e300;
    std::vector<double> p(4);
    for (double a : levels)
        for (double b : levels)
            for (double c : levels)
                for (double d : levels) {
                    p = {a, b, c, d};
                    double cost = 0.0, prev = 0.0;
                    for (int t = 0; t < 4; ++t) {
                        if (p[t] > 0.0) {
                            cost += g.fuel_rate(p[t]);
                            if (prev == 0.0) cost += g.cost_up;
                        } else if (prev > 0.0) {
                            cost += g.cost_down;
                        }
                        double resid = cfg.load_e[t] - p[t];
                        cost += resid > 0 ? cfg.grid_tie.price_buy[t] * resid
                                          : cfg.grid_tie.price_sell[t] * resid;
                        prev = p[t];
                    }
                    best = std::min(best, cost);
                }
    CHECK(best >= r.plan.costs.total - 1e-6);
    // the continuous optimum (flat 50 kW) lies on the lattice
    CHECK(best == doctest::Approx(r.plan.costs.total).epsilon(1e-7));
}

TEST_CASE("storage invariants on the richer toy plan") {
    ScenarioConfig cfg = rich_toy_scenario();
    DayAheadResult r = solve_day_ahead(cfg, {}, false);
    REQUIRE(r.status == SolveStatus::Optimal);
    const DispatchPlan& p = r.plan;
    const int T = cfg.day_ahead_grid.n_steps;
    const double dt = cfg.day_ahead_grid.dt_hours();

    double soc = cfg.battery.soc_start * cfg.battery.capacity;
    double hs = cfg.heat.hs_soc_start * cfg.heat.hs_capacity;
    for (int t = 0; t < T; ++t) {
        CHECK(p.p_ess_ch[t] * p.p_ess_dis[t] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(p.h_hs_ch[t] * p.h_hs_dis[t] == doctest::Approx(0.0).epsilon(1e-9));
        soc += dt * (cfg.battery.eta_ch * p.p_ess_ch[t] -
                     p.p_ess_dis[t] / cfg.battery.eta_dis);
        CHECK(p.ess_soc[t] == doctest::Approx(soc).epsilon(1e-6));
        CHECK(soc >= cfg.battery.soc_min * cfg.battery.capacity - 1e-6);
        CHECK(soc <= cfg.battery.soc_max * cfg.battery.capacity + 1e-6);
        hs += dt * (p.h_hs_ch[t] - p.h_hs_dis[t]);
        CHECK(p.hs_soc[t] == doctest::Approx(hs).epsilon(1e-6));
        // heat balance
        CHECK(p.q_hp[t] + p.h_hs_dis[t] - p.h_hs_ch[t] ==
              doctest::Approx(cfg.load_h[t]).epsilon(1e-6));
        CHECK(p.p_hp[t] == doctest::Approx(p.q_hp[t] / cfg.heat.hp_cop).epsilon(1e-6));
        // reserve margin with a noisy PV plant
        CHECK(supply_margin(cfg, p, t) ==
              doctest::Approx(p.reserve[t]).epsilon(1e-6));
    }
    // cyclic storage: end where the day started
    CHECK(p.ess_soc[T - 1] == doctest::Approx(cfg.battery.soc_start *
                                              cfg.battery.capacity).epsilon(1e-6));
    CHECK(p.hs_soc[T - 1] == doctest::Approx(cfg.heat.hs_soc_start *
                                             cfg.heat.hs_capacity).epsilon(1e-6));
}

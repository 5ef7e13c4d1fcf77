#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "menet/ev.hpp"
#include "menet/rng.hpp"
#include "menet/station.hpp"

using namespace menet;

namespace {

EvSession make_session(const std::string& id, int arrive, int leave,
                       double soc_arrive, double soc_leave, double soc_max,
                       double p_max = 7.0) {
    EvSession s;
    s.id = id;
    s.station_id = "st";
    s.t_arrive = arrive;
    s.t_leave = leave;
    s.soc_arrive = soc_arrive;
    s.soc_leave = soc_leave;
    s.soc_min = 0.0;
    s.soc_max = soc_max;
    s.p_ch_max = p_max;
    s.p_dis_max = p_max;
    s.eta_ch = 0.95;
    s.eta_dis = 0.95;
    s.eta_ref = 1.0;
    return s;
}

// Greedy feasible per-session schedule: charge toward soc_leave as early as
// possible, never breaching the corridor; terminal SOC lands on soc_leave.
StationSchedule greedy_session_schedule(const EvSession& s, const TimeGrid& g) {
    StationSchedule sch;
    sch.p_ch = Profile(g, Unit::kW);
    sch.p_dis = Profile(g, Unit::kW);
    sch.soc = Profile(g, Unit::kWh);
    double dt = g.dt_hours();
    double soc = 0.0;
    for (int t = 0; t < g.n_steps; ++t) {
        if (t == s.t_arrive) soc += s.soc_arrive;
        if (t == s.t_leave + 1) soc -= s.soc_leave;
        if (t >= s.t_arrive && t <= s.t_leave) {
            double need = s.soc_leave - soc;
            double p = 0.0;
            if (need > 1e-12)
                p = std::min({s.p_ch_max, need / (s.eta_ch * dt),
                              (s.soc_max - soc) / (s.eta_ch * dt)});
            sch.p_ch[t] = std::max(0.0, p);
            soc += s.eta_ch * sch.p_ch[t] * dt;
        }
        sch.soc[t] = soc;
    }
    return sch;
}

// Random feasible per-session schedule sampled step by step inside the
// corridor; departure SOC is then pinned by adjusting soc_leave.
EvSession random_feasible(const TimeGrid& g, uint64_t seed, uint64_t stream,
                          uint64_t& ctr, StationSchedule& sch) {
    double dt = g.dt_hours();
    auto u = [&](double lo, double hi) {
        return rng::uniform(seed, stream, ctr++, lo, hi);
    };
    int arrive = static_cast<int>(u(0, g.n_steps - 2));
    int leave = arrive + static_cast<int>(u(1, g.n_steps - 1 - arrive));
    leave = std::min(leave, g.n_steps - 2);
    double soc_max = u(20.0, 80.0);
    EvSession s = make_session("r", arrive, leave, u(0.2, 0.5) * soc_max, 0.0,
                               soc_max);
    sch.p_ch = Profile(g, Unit::kW);
    sch.p_dis = Profile(g, Unit::kW);
    sch.soc = Profile(g, Unit::kWh);
    double soc = 0.0;
    for (int t = 0; t < g.n_steps; ++t) {
        if (t == s.t_arrive) soc += s.soc_arrive;
        if (t >= s.t_arrive && t <= s.t_leave) {
            double ch_cap = std::min(s.p_ch_max, (s.soc_max - soc) / (s.eta_ch * dt));
            double dis_cap =
                std::min(s.p_dis_max, soc * s.eta_dis / (s.eta_ref * dt));
            if (u(0, 1) < 0.6)
                sch.p_ch[t] = u(0, std::max(0.0, ch_cap));
            else
                sch.p_dis[t] = u(0, std::max(0.0, dis_cap));
            soc += s.eta_ch * sch.p_ch[t] * dt -
                   s.eta_ref * sch.p_dis[t] * dt / s.eta_dis;
        }
        if (t == s.t_leave) s.soc_leave = soc;  // pin departure withdrawal
        if (t == s.t_leave + 1) soc -= s.soc_leave;
        sch.soc[t] = soc;
    }
    return s;
}

StationSchedule sum_schedules(const std::vector<StationSchedule>& parts,
                              const TimeGrid& g) {
    StationSchedule sum;
    sum.p_ch = Profile(g, Unit::kW);
    sum.p_dis = Profile(g, Unit::kW);
    sum.soc = Profile(g, Unit::kWh);
    for (const auto& p : parts)
        for (int t = 0; t < g.n_steps; ++t) {
            sum.p_ch[t] += p.p_ch[t];
            sum.p_dis[t] += p.p_dis[t];
            sum.soc[t] += p.soc[t];
        }
    return sum;
}

}  // namespace

TEST_CASE("aggregate of one session equals that session's bounds") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession s = make_session("a", 8, 16, 12.0, 35.0, 40.0);
    StationEnvelope env = aggregate({s}, g, "st");
    for (int t = 0; t < g.n_steps; ++t) {
        bool in = t >= 8 && t <= 16;
        CHECK(env.p_ch_max[t] == (in ? 7.0 : 0.0));
        CHECK(env.p_dis_max[t] == (in ? 7.0 : 0.0));
        CHECK(env.s_max[t] == (in ? 40.0 : 0.0));
        CHECK(env.s_min[t] == 0.0);
    }
    CHECK(env.delta_s[8] == doctest::Approx(12.0));
    CHECK(env.delta_s[17] == doctest::Approx(-35.0));
}

TEST_CASE("aggregate adds overlapping identical sessions componentwise") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession a = make_session("a", 5, 15, 10.0, 35.0, 40.0);
    EvSession b = make_session("b", 5, 15, 10.0, 35.0, 40.0);
    StationEnvelope env = aggregate({a, b}, g, "st");
    CHECK(env.p_ch_max[10] == doctest::Approx(14.0));
    CHECK(env.s_max[10] == doctest::Approx(80.0));

    StationEnvelope empty = aggregate({}, g, "st");
    for (int t = 0; t < g.n_steps; ++t) {
        CHECK(empty.p_ch_max[t] == 0.0);
        CHECK(empty.s_max[t] == 0.0);
        CHECK(empty.delta_s[t] == 0.0);
    }
}

TEST_CASE("aggregate rejects heterogeneous efficiencies") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession a = make_session("a", 5, 15, 10.0, 35.0, 40.0);
    EvSession b = a;
    b.id = "b";
    b.eta_ch = 0.9;
    CHECK_THROWS_AS(aggregate({a, b}, g, "st"), std::invalid_argument);
}

TEST_CASE("envelope linearity: aggregate(A u B) == aggregate(A) + aggregate(B)") {
    TimeGrid g = TimeGrid::day_ahead();
    FleetSpec spec;
    spec.n_evs = 8;
    spec.seed = 5;
    auto fleet = synthesize_fleet(spec, g, "st");
    std::vector<EvSession> A(fleet.begin(), fleet.begin() + 4);
    std::vector<EvSession> B(fleet.begin() + 4, fleet.end());
    StationEnvelope ea = aggregate(A, g), eb = aggregate(B, g),
                    eab = aggregate(fleet, g);
    for (int t = 0; t < g.n_steps; ++t) {
        CHECK(eab.p_ch_max[t] ==
              doctest::Approx(ea.p_ch_max[t] + eb.p_ch_max[t]).epsilon(1e-12));
        CHECK(eab.s_max[t] == doctest::Approx(ea.s_max[t] + eb.s_max[t]).epsilon(1e-12));
        CHECK(eab.s_min[t] == doctest::Approx(ea.s_min[t] + eb.s_min[t]).epsilon(1e-12));
        CHECK(eab.delta_s[t] ==
              doctest::Approx(ea.delta_s[t] + eb.delta_s[t]).epsilon(1e-12));
    }
}

TEST_CASE("validate_schedule flags constructed violations") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession s = make_session("a", 8, 16, 12.0, 12.0, 40.0);
    StationEnvelope env = aggregate({s}, g, "st");

    StationSchedule idle;
    idle.p_ch = Profile(g, Unit::kW);
    idle.p_dis = Profile(g, Unit::kW);
    idle.soc = implied_soc(env, idle.p_ch, idle.p_dis);
    CHECK(validate_schedule(env, idle).empty());

    StationSchedule bad = idle;
    bad.p_ch[2] = 1.0;  // nobody present at step 2
    auto report = validate_schedule(env, bad);
    REQUIRE(!report.empty());
    CHECK(report.front().step == 2);
    CHECK(report.front().constraint == "p_ch <= p_ch_max");
}

TEST_CASE("containment: summed feasible schedules pass aggregate validation") {
    // >= 1000 seeded trials, <= 6 EVs x 24 steps, zero violations
    TimeGrid g = TimeGrid::day_ahead();
    int violations = 0;
    for (uint64_t trial = 0; trial < 1000; ++trial) {
        uint64_t ctr = 0;
        int n = 1 + static_cast<int>(rng::uniform(901, trial, ctr++, 0, 5.999));
        std::vector<EvSession> sessions;
        std::vector<StationSchedule> schedules;
        for (int i = 0; i < n; ++i) {
            StationSchedule sch;
            sessions.push_back(random_feasible(g, 901, trial, ctr, sch));
            schedules.push_back(std::move(sch));
        }
        StationEnvelope env = aggregate(sessions, g);
        StationSchedule sum = sum_schedules(schedules, g);
        violations += validate_schedule(env, sum).empty() ? 0 : 1;
    }
    CHECK(violations == 0);
}

TEST_CASE("disaggregate returns the schedule itself for one session") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession s = make_session("a", 3, 20, 10.0, 38.0, 40.0);
    StationEnvelope env = aggregate({s}, g, "st");
    StationSchedule sch = greedy_session_schedule(s, g);
    REQUIRE(validate_schedule(env, sch).empty());
    DisaggregationResult r = disaggregate(env, sch, {s});
    REQUIRE(r.decomposable);
    REQUIRE(r.per_session.size() == 1);
    for (int t = 0; t < g.n_steps; ++t) {
        CHECK(r.per_session[0].p_ch[t] == doctest::Approx(sch.p_ch[t]).epsilon(1e-6));
        CHECK(r.per_session[0].p_dis[t] == doctest::Approx(sch.p_dis[t]).epsilon(1e-6));
    }
}

TEST_CASE("disaggregate splits two identical full-horizon sessions") {
    TimeGrid g{0.0, 60, 8};
    EvSession a = make_session("a", 0, 6, 10.0, 20.0, 40.0);
    EvSession b = a;
    b.id = "b";
    StationEnvelope env = aggregate({a, b}, g);
    StationSchedule sch;
    sch.p_ch = Profile(g, Unit::kW);
    sch.p_dis = Profile(g, Unit::kW);
    // constant charge meeting the joint energy need exactly
    double dt = g.dt_hours();
    double need = 2 * (20.0 - 10.0);  // kWh joint
    double p = need / (0.95 * 7 * dt);
    for (int t = 0; t <= 6; ++t) sch.p_ch[t] = p;
    sch.soc = implied_soc(env, sch.p_ch, sch.p_dis);
    REQUIRE(validate_schedule(env, sch).empty());
    DisaggregationResult r = disaggregate(env, sch, {a, b});
    REQUIRE(r.decomposable);
    for (int t = 0; t <= 6; ++t)
        CHECK(r.per_session[0].p_ch[t] + r.per_session[1].p_ch[t] ==
              doctest::Approx(p).epsilon(1e-6));
}

TEST_CASE("disaggregate detects non-decomposable aggregate points") {
    // Two disjoint windows; the aggregate asks the later EV to deliver energy
    // only the departed one carried.
    TimeGrid g{0.0, 60, 10};
    EvSession a = make_session("a", 0, 3, 30.0, 30.0, 40.0, 7.0);
    EvSession b = make_session("b", 5, 8, 2.0, 2.0, 40.0, 7.0);
    StationEnvelope env = aggregate({a, b}, g);
    StationSchedule sch;
    sch.p_ch = Profile(g, Unit::kW);
    sch.p_dis = Profile(g, Unit::kW);
    // discharge 6 kW for 3 steps in b's window: needs 18.9 kWh but b holds 2
    for (int t = 5; t <= 7; ++t) sch.p_dis[t] = 6.0;
    sch.soc = implied_soc(env, sch.p_ch, sch.p_dis);
    DisaggregationResult r = disaggregate(env, sch, {a, b});
    CHECK(!r.decomposable);
    CHECK(r.gap_kwh > 0.0);
}

TEST_CASE("exactness under identical windows: aggregate-feasible implies decomposable") {
    // >= 100 seeded trials with full-horizon sessions: the summed sample is
    // aggregate-feasible (containment) and decomposable by construction, so
    // the disaggregation LP must succeed every time.
    TimeGrid g{0.0, 60, 24};
    double dt = g.dt_hours();
    int failures = 0;
    for (uint64_t trial = 0; trial < 100; ++trial) {
        uint64_t ctr = 0;
        auto u = [&](double lo, double hi) {
            return rng::uniform(902, trial, ctr++, lo, hi);
        };
        int n = 2 + static_cast<int>(u(0, 2.999));
        std::vector<EvSession> sessions;
        std::vector<StationSchedule> parts;
        for (int i = 0; i < n; ++i) {
            double soc_max = u(20.0, 60.0);
            EvSession s = make_session("e" + std::to_string(i), 0, g.n_steps - 2,
                                       u(0.2, 0.5) * soc_max, 0.0, soc_max);
            StationSchedule sch;
            sch.p_ch = Profile(g, Unit::kW);
            sch.p_dis = Profile(g, Unit::kW);
            sch.soc = Profile(g, Unit::kWh);
            double soc = 0.0;
            for (int t = 0; t < g.n_steps; ++t) {
                if (t == s.t_arrive) soc += s.soc_arrive;
                if (t >= s.t_arrive && t <= s.t_leave) {
                    double ch_cap =
                        std::min(s.p_ch_max, (s.soc_max - soc) / (s.eta_ch * dt));
                    double dis_cap =
                        std::min(s.p_dis_max, soc * s.eta_dis / (s.eta_ref * dt));
                    if (u(0, 1) < 0.5)
                        sch.p_ch[t] = u(0, std::max(0.0, ch_cap));
                    else
                        sch.p_dis[t] = u(0, std::max(0.0, dis_cap));
                    soc += s.eta_ch * sch.p_ch[t] * dt -
                           s.eta_ref * sch.p_dis[t] * dt / s.eta_dis;
                }
                if (t == s.t_leave) s.soc_leave = soc;
                if (t == s.t_leave + 1) soc -= s.soc_leave;
                sch.soc[t] = soc;
            }
            sessions.push_back(s);
            parts.push_back(std::move(sch));
        }
        StationEnvelope env = aggregate(sessions, g);
        StationSchedule sum = sum_schedules(parts, g);
        REQUIRE(validate_schedule(env, sum).empty());
        DisaggregationResult r = disaggregate(env, sum, sessions);
        failures += r.decomposable ? 0 : 1;
    }
    CHECK(failures == 0);
}

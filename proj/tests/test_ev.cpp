#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "menet/ev.hpp"

using namespace menet;

namespace {

EvSession make_session() {
    EvSession s;
    s.id = "ev0";
    s.station_id = "st0";
    s.t_arrive = 10;
    s.t_leave = 20;
    s.soc_arrive = 12.0;
    s.soc_leave = 18.0;
    s.soc_min = 4.0;
    s.soc_max = 40.0;
    s.p_ch_max = 7.0;
    s.p_dis_max = 7.0;
    s.eta_ch = 0.95;
    s.eta_dis = 0.95;
    s.eta_ref = 1.0;
    return s;
}

}  // namespace

TEST_CASE("presence indicator spans exactly the stay window") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession s = make_session();
    PresenceSeries d = presence(s, g);
    for (int t = 0; t < g.n_steps; ++t)
        CHECK(d.at(t) == (t >= 10 && t <= 20));

    s.t_arrive = 0;
    s.t_leave = 23;
    PresenceSeries full = presence(s, g);
    for (int t = 0; t < g.n_steps; ++t) CHECK(full.at(t));
}

TEST_CASE("presence boundary products mark arrival and departure") {
    TimeGrid g = TimeGrid::day_ahead();
    PresenceSeries d = presence(make_session(), g);
    auto at = [&](int t) { return t >= 0 && t < g.n_steps ? (d.at(t) ? 1 : 0) : 0; };
    for (int t = 0; t < g.n_steps; ++t) {
        int arrive_mark = at(t) * (at(t) - at(t - 1));
        int depart_mark = at(t - 1) * (at(t - 1) - at(t));
        CHECK(arrive_mark == (t == 10 ? 1 : 0));
        CHECK(depart_mark == (t == 21 ? 1 : 0));
    }
}

TEST_CASE("soc_step matches the recursion by direct substitution") {
    EvSession s = make_session();
    CHECK(soc_step(s, 10.0, 5.0, 0.0, 1.0) == doctest::Approx(14.75).epsilon(1e-12));
    CHECK(soc_step(s, 10.0, 0.0, 0.0, 1.0) == doctest::Approx(10.0).epsilon(1e-12));

    EvSession r = s;
    r.eta_dis = 0.9;
    r.eta_ref = 1.0;
    CHECK(soc_step(r, 10.0, 0.0, 4.5, 1.0) == doctest::Approx(5.0).epsilon(1e-12));

    CHECK_THROWS_AS(soc_step(s, 10.0, 8.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(soc_step(s, 10.0, 0.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("boundary injections place arrival and departure energy") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession s = make_session();
    Profile inj = boundary_injections(s, g);
    for (int t = 0; t < g.n_steps; ++t) {
        if (t == 10) CHECK(inj[t] == doctest::Approx(12.0));
        else if (t == 21) CHECK(inj[t] == doctest::Approx(-18.0));
        else CHECK(inj[t] == 0.0);
    }
    double total = 0.0;
    for (double v : inj.values) total += v;
    CHECK(total == doctest::Approx(s.soc_arrive - s.soc_leave).epsilon(1e-12));

    // departure correction falls outside the grid for a full-horizon stay
    s.t_arrive = 0;
    s.t_leave = 23;
    Profile full = boundary_injections(s, g);
    CHECK(full[0] == doctest::Approx(12.0));
    for (int t = 1; t < g.n_steps; ++t) CHECK(full[t] == 0.0);
}

TEST_CASE("session validation rejects broken invariants") {
    TimeGrid g = TimeGrid::day_ahead();
    EvSession s = make_session();
    CHECK_NOTHROW(s.validate(g));

    EvSession a = s;
    a.t_leave = 30;
    CHECK_THROWS_AS(a.validate(g), std::out_of_range);
    EvSession b = s;
    b.soc_arrive = 45.0;
    CHECK_THROWS_AS(b.validate(g), std::invalid_argument);
    EvSession c = s;
    c.p_ch_max = -1.0;
    CHECK_THROWS_AS(c.validate(g), std::invalid_argument);
}

TEST_CASE("synthesize_fleet is deterministic and always valid") {
    TimeGrid g = TimeGrid::day_ahead();
    FleetSpec spec;
    spec.n_evs = 0;
    CHECK(synthesize_fleet(spec, g, "st0").empty());

    spec.n_evs = 50;
    spec.seed = 42;
    auto a = synthesize_fleet(spec, g, "st0");
    auto b = synthesize_fleet(spec, g, "st0");
    REQUIRE(a.size() == 50);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].t_arrive == b[i].t_arrive);
        CHECK(a[i].t_leave == b[i].t_leave);
        CHECK(a[i].soc_arrive == b[i].soc_arrive);
        CHECK(a[i].soc_leave == b[i].soc_leave);
        CHECK_NOTHROW(a[i].validate(g));
        CHECK(soc_target_reachable(a[i], g));
    }

    spec.seed = 43;
    auto c = synthesize_fleet(spec, g, "st0");
    bool differs = false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].t_arrive != c[i].t_arrive || a[i].soc_max != c[i].soc_max)
            differs = true;
    CHECK(differs);
}

TEST_CASE("synthesize_fleet works on the intra-day grid too") {
    TimeGrid g = TimeGrid::intra_day();
    FleetSpec spec;
    spec.n_evs = 30;
    spec.seed = 7;
    auto fleet = synthesize_fleet(spec, g, "st1");
    for (const auto& s : fleet) {
        CHECK_NOTHROW(s.validate(g));
        CHECK(s.t_leave <= g.n_steps - 2);
        CHECK(soc_target_reachable(s, g));
    }
}

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "menet/forecast.hpp"

using namespace menet;

TEST_CASE("zero sigma realization equals forecast exactly") {
    TimeGrid g = TimeGrid::day_ahead();
    Profile f(g, Unit::kW);
    for (int t = 0; t < g.n_steps; ++t) f[t] = 10.0 + t;
    ForecastModel fm{f, Profile(g, Unit::kW), 7};
    Profile r = sample_realization(fm, 3);
    for (int t = 0; t < g.n_steps; ++t) CHECK(r[t] == f[t]);
}

TEST_CASE("zero forecast stays nonnegative under any sigma") {
    TimeGrid g = TimeGrid::day_ahead();
    ForecastModel fm{Profile(g, Unit::kW), Profile(g, Unit::kW, 25.0), 11};
    for (uint64_t off = 0; off < 50; ++off) {
        Profile r = sample_realization(fm, off);
        for (int t = 0; t < g.n_steps; ++t) CHECK(r[t] >= 0.0);
    }
}

TEST_CASE("sample mean converges to forecast (Monte Carlo)") {
    TimeGrid g{0.0, 60, 1};
    Profile f(g, Unit::kW, 100.0);
    ForecastModel fm{f, Profile(g, Unit::kW, 8.0), 123};
    const int N = 10000;
    double sum = 0.0;
    for (int i = 0; i < N; ++i)
        sum += sample_realization(fm, static_cast<uint64_t>(i))[0];
    double mean = sum / N;
    CHECK(std::abs(mean - 100.0) < 3.0 * 8.0 / std::sqrt(double(N)));
}

TEST_CASE("realization is a pure function of model and offset") {
    TimeGrid g = TimeGrid::day_ahead();
    Profile f(g, Unit::kW, 50.0);
    ForecastModel fm = proportional_forecast(f, 0.1, 99);
    Profile a = sample_realization(fm, 4);
    Profile b = sample_realization(fm, 4);
    Profile c = sample_realization(fm, 5);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("proportional forecast scales sigma and rejects negatives") {
    TimeGrid g = TimeGrid::day_ahead();
    Profile f(g, Unit::kW);
    for (int t = 0; t < g.n_steps; ++t) f[t] = 10.0 * t;
    ForecastModel fm = proportional_forecast(f, 0.1, 1);
    for (int t = 0; t < g.n_steps; ++t)
        CHECK(fm.sigma[t] == doctest::Approx(1.0 * t).epsilon(1e-12));

    ForecastModel bad = fm;
    bad.sigma[3] = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

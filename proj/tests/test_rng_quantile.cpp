#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "menet/quantile.hpp"
#include "menet/rng.hpp"

using namespace menet;

namespace {

// Independent oracle: bisection on the normal CDF computed from a
// power-series error function.
double erf_series(double x) {
    double sum = 0.0, term = x;
    for (int n = 0; n < 200; ++n) {
        sum += term / (2 * n + 1);
        term *= -x * x / (n + 1);
        if (std::abs(term) < 1e-18) break;
    }
    return sum * 2.0 / std::sqrt(M_PI);
}

double cdf_oracle(double x) { return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))); }

double quantile_oracle(double eta) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf_oracle(mid) < eta) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("std_normal_quantile matches bisection oracle") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK(std_normal_quantile(0.95) == doctest::Approx(1.644854).epsilon(1e-6));
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    for (double eta : {0.01, 0.1, 0.3, 0.6, 0.9, 0.99, 0.999}) {
        CHECK(std_normal_quantile(eta) ==
              doctest::Approx(quantile_oracle(eta)).epsilon(1e-9));
    }
}

TEST_CASE("quantile is antisymmetric and increasing") {
    double prev = -1e18;
    for (double eta = 0.02; eta < 0.99; eta += 0.013) {
        double q = std_normal_quantile(eta);
        CHECK(q > prev);
        prev = q;
        CHECK(std_normal_quantile(1.0 - eta) == doctest::Approx(-q).epsilon(1e-9));
    }
}

TEST_CASE("quantile domain errors") {
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("counter rng is pure and roughly normal") {
    CHECK(rng::normal(7, 3, 11) == rng::normal(7, 3, 11));
    CHECK(rng::normal(7, 3, 11) != rng::normal(7, 3, 12));
    CHECK(rng::normal(7, 4, 11) != rng::normal(7, 3, 11));

    int n = 20000;
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) mean += rng::normal(123, 0, static_cast<uint64_t>(i));
    mean /= n;
    for (int i = 0; i < n; ++i) {
        double d = rng::normal(123, 0, static_cast<uint64_t>(i)) - mean;
        var += d * d;
    }
    var /= n - 1;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("uniform01 stays inside the open interval") {
    for (uint64_t c = 0; c < 5000; ++c) {
        double u = rng::uniform01(42, 9, c);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

#pragma once

#include <cstdint>

#include "menet/timegrid.hpp"

namespace menet {

// Point forecast plus per-step error standard deviation. Realized output
// is forecast + N(0, sigma^2), clamped at zero.
struct ForecastModel {
    Profile forecast;        // kW
    Profile sigma;           // kW, std-dev per step
    uint64_t seed = 0;

    void validate() const;
};

// Deterministic seeded realization; pure function of (fm, seed_offset).
Profile sample_realization(const ForecastModel& fm, uint64_t seed_offset);

// Forecast with per-step sigma as a fixed fraction of the point forecast.
ForecastModel proportional_forecast(const Profile& forecast, double sigma_frac,
                                    uint64_t seed);

}  // namespace menet

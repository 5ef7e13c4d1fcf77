#include "menet/forecast.hpp"

#include <algorithm>
#include <stdexcept>

#include "menet/rng.hpp"

namespace menet {

void ForecastModel::validate() const {
    if (forecast.grid != sigma.grid)
        throw std::invalid_argument("forecast/sigma grid mismatch");
    for (double s : sigma.values)
        if (s < 0.0) throw std::invalid_argument("sigma must be nonnegative");
}

Profile sample_realization(const ForecastModel& fm, uint64_t seed_offset) {
    fm.validate();
    Profile out(fm.forecast.grid, Unit::kW);
    for (int t = 0; t < out.size(); ++t) {
        double e = fm.sigma[t] * rng::normal(fm.seed, seed_offset,
                                             static_cast<uint64_t>(t));
        out[t] = std::max(0.0, fm.forecast[t] + e);
    }
    return out;
}

ForecastModel proportional_forecast(const Profile& forecast, double sigma_frac,
                                    uint64_t seed) {
    ForecastModel fm;
    fm.forecast = forecast;
    fm.sigma = Profile(forecast.grid, Unit::kW);
    for (int t = 0; t < forecast.size(); ++t)
        fm.sigma[t] = sigma_frac * std::max(0.0, forecast[t]);
    fm.seed = seed;
    return fm;
}

}  // namespace menet

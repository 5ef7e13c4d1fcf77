#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace menet {

// Uniform discrete time axis. The day-ahead grid is 60 min x 24 steps,
// the intra-day grid 15 min x 96 steps; both span a full day.
struct TimeGrid {
    double start_hour = 0.0;
    int step_minutes = 60;
    int n_steps = 24;

    double dt_hours() const { return step_minutes / 60.0; }
    double horizon_hours() const { return dt_hours() * n_steps; }

    // Two grids are alignable iff one step size is an integer multiple
    // of the other and they cover the same span.
    bool alignable_with(const TimeGrid& other) const;

    bool operator==(const TimeGrid&) const = default;

    static TimeGrid day_ahead() { return {0.0, 60, 24}; }
    static TimeGrid intra_day() { return {0.0, 15, 96}; }
};

enum class Unit { kW, kWh, CurrencyPerKwh, Dimensionless };

std::string unit_name(Unit u);
Unit unit_from_name(const std::string& s);

// Per-step numeric series on a TimeGrid.
struct Profile {
    TimeGrid grid;
    Unit unit = Unit::kW;
    std::vector<double> values;

    Profile() = default;
    Profile(const TimeGrid& g, Unit u, double fill = 0.0)
        : grid(g), unit(u), values(static_cast<size_t>(g.n_steps), fill) {}
    Profile(const TimeGrid& g, Unit u, std::vector<double> v);

    double& operator[](int t) { return values[static_cast<size_t>(t)]; }
    double operator[](int t) const { return values[static_cast<size_t>(t)]; }
    int size() const { return static_cast<int>(values.size()); }

    // Sum of value*dt; the energy of a kW profile in kWh.
    double energy() const;
    double max_value() const;
    double min_value() const;
};

// Piecewise-constant, energy-preserving refinement; averaging coarsening.
// Throws std::invalid_argument when the grids are not alignable.
Profile resample(const Profile& p, const TimeGrid& target);

}  // namespace menet

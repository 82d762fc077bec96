#pragma once

#include <vector>

#include "psychflow/scenario/types.hpp"
#include "psychflow/sim/random.hpp"

namespace psychflow::flow {

/// Arrival times in [0, horizon_hours) for a weekly day-of-week rate profile
/// (patients/day, Monday first; day 0 of a run is a Monday), generated by
/// thinning against the busiest day's hourly rate.
std::vector<double> weekly_arrival_times(const DailyRates& per_day,
                                         double rate_multiplier,
                                         double horizon_hours,
                                         sim::RngStream& rng);

/// Arrival times in [0, horizon_hours) for a constant rate in patients/day.
std::vector<double> steady_arrival_times(double per_day,
                                         double horizon_hours,
                                         sim::RngStream& rng);

}  // namespace psychflow::flow

#include "psychflow/flow/arrivals.hpp"

#include <algorithm>
#include <cmath>

namespace psychflow::flow {

std::vector<double> weekly_arrival_times(const DailyRates& per_day,
                                         double rate_multiplier,
                                         double horizon_hours,
                                         sim::RngStream& rng) {
  std::vector<double> times;
  const double peak_per_day =
      *std::max_element(per_day.begin(), per_day.end()) * rate_multiplier;
  const double peak_hourly = peak_per_day / 24.0;
  if (peak_hourly <= 0.0 || horizon_hours <= 0.0) return times;

  double t = 0.0;
  while (true) {
    t += rng.exponential(1.0 / peak_hourly);
    if (t >= horizon_hours) break;
    const int day_of_week = static_cast<int>(std::fmod(t / 24.0, 7.0));
    const double hourly =
        per_day[static_cast<std::size_t>(day_of_week)] * rate_multiplier / 24.0;
    if (rng.uniform01() < hourly / peak_hourly) times.push_back(t);
  }
  return times;
}

std::vector<double> steady_arrival_times(double per_day,
                                         double horizon_hours,
                                         sim::RngStream& rng) {
  std::vector<double> times;
  if (per_day <= 0.0 || horizon_hours <= 0.0) return times;
  const double mean_gap_hours = 24.0 / per_day;
  double t = 0.0;
  while (true) {
    t += rng.exponential(mean_gap_hours);
    if (t >= horizon_hours) break;
    times.push_back(t);
  }
  return times;
}

}  // namespace psychflow::flow

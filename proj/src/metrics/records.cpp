#include "psychflow/metrics/records.hpp"

#include <fmt/format.h>

#include "psychflow/util/csv.hpp"

namespace psychflow::metrics {

std::string to_string(OriginType o) {
  return o == OriginType::Ed ? "ed" : "direct";
}

void OccupancyAccumulator::update(double t, int level) {
  if (finished_) throw MetricsError("occupancy accumulator already finished");
  if (t < last_) {
    throw MetricsError(fmt::format(
        "occupancy update out of order: t={} after t={}", t, last_));
  }
  if (level < 0) throw MetricsError("occupancy level cannot be negative");
  if (t > window_start_) {
    area_ += level_ * (t - std::max(last_, window_start_));
  }
  last_ = t;
  level_ = level;
}

void OccupancyAccumulator::finish(double t_end) {
  update(t_end, level_);
  finished_ = true;
}

double OccupancyAccumulator::mean_occupancy(int capacity, double t_end) const {
  const double window = t_end - window_start_;
  if (capacity <= 0 || window <= 0.0) return 0.0;
  return area_ / (capacity * window);
}

void Collector::record(PatientRecord rec) {
  if (rec.disposition_hours < warmup_end_) {
    ++discarded_;
    return;
  }
  records_.push_back(std::move(rec));
}

std::string patient_csv_header() {
  return util::csv_line({
      "replication", "patient_id", "origin_type", "origin_id",
      "origin_facility_id", "age_group", "vulnerable", "acuity",
      "disposition_hours", "censored", "placement_hours",
      "coordination_hours", "travel_hours", "treatment_delay_hours",
      "los_hours", "destination_unit_id", "destination_facility_id",
      "transferred", "distance_miles", "search_attempts", "requests_sent",
      "final_attempt_requests"});
}

namespace {

std::string num(double v) { return std::isnan(v) ? "" : fmt::format("{}", v); }

}  // namespace

std::string patient_csv_row(const PatientRecord& r) {
  std::vector<std::string> cells{
      fmt::format("{}", r.replication),
      fmt::format("{}", r.patient_id),
      to_string(r.origin),
      r.origin_id,
      r.origin_facility_id,
      to_string(r.age_group),
      r.vulnerable ? "1" : "0",
      num(r.acuity),
      num(r.disposition_hours),
      r.censored ? "1" : "0",
  };
  if (r.censored) {
    // Journey columns stay blank; the patient never reached a bed.
    for (int i = 0; i < 9; ++i) cells.emplace_back("");
  } else {
    cells.push_back(num(r.placement_hours));
    cells.push_back(num(r.coordination_hours));
    cells.push_back(num(r.travel_hours));
    cells.push_back(num(r.treatment_delay_hours));
    cells.push_back(num(r.los_hours));
    cells.push_back(r.destination_unit_id);
    cells.push_back(r.destination_facility_id);
    cells.push_back(r.transferred ? "1" : "0");
    cells.push_back(num(r.distance_miles));
  }
  cells.push_back(fmt::format("{}", r.search_attempts));
  cells.push_back(fmt::format("{}", r.requests_sent));
  cells.push_back(fmt::format("{}", r.final_attempt_requests));
  return util::csv_line(cells);
}

}  // namespace psychflow::metrics

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "psychflow/errors.hpp"
#include "psychflow/scenario/types.hpp"

namespace psychflow::metrics {

struct MetricsError : Error {
  using Error::Error;
};

enum class OriginType { Ed, Direct };

std::string to_string(OriginType o);

/// One patient's complete journey, emitted when the patient leaves the
/// system (discharge) or is cut off by the horizon (censored = still
/// waiting for a bed when the run ended).
struct PatientRecord {
  int replication = 0;
  long patient_id = 0;
  OriginType origin = OriginType::Ed;
  std::string origin_id;           ///< ED id, or unit id for direct admissions
  std::string origin_facility_id;
  AgeGroup age_group = AgeGroup::Adult;
  bool vulnerable = false;
  double acuity = std::nan("");    ///< referral acuity; NaN for direct admissions
  double disposition_hours = 0.0;  ///< ready-for-placement instant

  bool censored = false;

  // Valid only when !censored:
  double placement_hours = 0.0;      ///< bed secured
  double coordination_hours = 0.0;   ///< disposition -> secured (waits + reviews)
  double travel_hours = 0.0;
  double treatment_delay_hours = 0.0;  ///< coordination + travel
  double los_hours = 0.0;
  std::string destination_unit_id;
  std::string destination_facility_id;
  bool transferred = false;  ///< destination facility differs from origin's
  double distance_miles = 0.0;

  int search_attempts = 0;         ///< bed searches run (>= 1 for ED patients)
  int requests_sent = 0;           ///< referral requests across all searches
  int final_attempt_requests = 0;  ///< requests within the successful search
};

/// Time-weighted census integrator over the post-warmup window.
/// Feed it every census change; updates must be non-decreasing in time.
class OccupancyAccumulator {
 public:
  explicit OccupancyAccumulator(double window_start)
      : window_start_(window_start) {}

  void update(double t, int level);
  void finish(double t_end);

  double busy_bed_hours() const { return area_; }
  /// Mean occupied fraction of `capacity` beds over [window_start, t_end].
  double mean_occupancy(int capacity, double t_end) const;

 private:
  double window_start_;
  double last_ = 0.0;  ///< simulation time starts at zero
  int level_ = 0;
  double area_ = 0.0;
  bool finished_ = false;
};

/// Gathers records for one replication, dropping pre-warmup dispositions.
class Collector {
 public:
  explicit Collector(double warmup_end) : warmup_end_(warmup_end) {}

  /// Keeps the record iff its disposition falls at/after the warm-up end.
  void record(PatientRecord rec);

  const std::vector<PatientRecord>& records() const { return records_; }
  std::vector<PatientRecord> take() { return std::move(records_); }
  long discarded_warmup() const { return discarded_; }

 private:
  double warmup_end_;
  std::vector<PatientRecord> records_;
  long discarded_ = 0;
};

/// patients.csv header + row serialization for PatientRecord.
std::string patient_csv_header();
std::string patient_csv_row(const PatientRecord& r);

}  // namespace psychflow::metrics

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psychflow/flow/placement.hpp"
#include "psychflow/metrics/records.hpp"
#include "psychflow/scenario/types.hpp"
#include "psychflow/sim/calendar.hpp"

namespace psychflow::flow {

/// Controls for one replication that are not part of the scenario itself.
struct RunOptions {
  std::uint64_t seed = 1;
  /// Seed for the demand side (arrivals + patient attributes). Comparisons
  /// with common random numbers share this across variants while letting
  /// `seed` differ. Defaults to `seed`.
  std::optional<std::uint64_t> demand_seed;
  /// Optional observer for every fired event (drives --trace output).
  std::function<void(double, const sim::EventLabel&)> trace;
  /// Test hook: replaces the exponential referral-review sampler.
  ReviewSampler review_override;
};

/// Per-unit end-of-run accounting.
struct UnitTotals {
  std::string unit_id;
  std::string facility_id;
  int capacity = 0;
  std::vector<AgeGroup> licensed_ages;

  std::uint64_t reserves_granted = 0;
  std::uint64_t reservation_commits = 0;
  std::uint64_t reservation_cancels = 0;
  std::uint64_t admissions = 0;
  std::uint64_t releases = 0;
  int in_service_end = 0;
  int reserved_end = 0;
  std::size_t queue_end = 0;

  double busy_bed_hours = 0.0;  ///< occupied bed-hours after warm-up
  double mean_occupancy = 0.0;  ///< busy fraction of capacity after warm-up
};

struct ReplicationResult {
  int replication = 0;
  double horizon_hours = 0.0;
  double warmup_hours = 0.0;

  std::vector<metrics::PatientRecord> records;  ///< post-warm-up journeys
  std::vector<UnitTotals> units;                ///< roster order

  long patients_total = 0;     ///< every patient created, incl. warm-up
  long discarded_warmup = 0;   ///< finished journeys dropped by the warm-up filter
  long censored = 0;           ///< still unplaced at the horizon
  long in_flight_end = 0;      ///< placed but still travelling or in a bed
  std::uint64_t events_fired = 0;
  std::uint64_t trace_hash = 0;  ///< order-sensitive digest of the event stream
};

/// Runs one replication of the scenario and returns its complete accounting.
/// Identical (scenario, replication, options) always produce an identical
/// result, including the trace digest.
ReplicationResult run_replication(const ScenarioConfig& scenario, int replication,
                                  const RunOptions& opts);

}  // namespace psychflow::flow

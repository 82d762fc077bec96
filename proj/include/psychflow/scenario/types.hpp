#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psychflow/util/time.hpp"

namespace psychflow {

// ---------------------------------------------------------------------------
// Age groups
// ---------------------------------------------------------------------------

/// Patient age bands. Children (0-11), adolescents (12-17) and geriatric
/// patients (65+) form the "vulnerable" population whose placements are
/// restricted to units licensed for their band.
enum class AgeGroup : int { Child = 0, Adolescent = 1, Adult = 2, Geriatric = 3 };

inline constexpr int kAgeGroupCount = 4;

inline constexpr std::array<AgeGroup, kAgeGroupCount> kAllAgeGroups = {
    AgeGroup::Child, AgeGroup::Adolescent, AgeGroup::Adult, AgeGroup::Geriatric};

/// Band for an integer age in years: <=11 child, 12-17 adolescent,
/// 18-64 adult, >=65 geriatric.
AgeGroup age_group_for_age(int years);

/// Vulnerable = any band other than Adult.
bool is_vulnerable(AgeGroup g);

std::string to_string(AgeGroup g);
AgeGroup parse_age_group(const std::string& name);  // throws ParseError

// ---------------------------------------------------------------------------
// Placement policies
// ---------------------------------------------------------------------------

/// How a bed search walks the candidate list.
enum class PolicyKind : int {
  Baseline = 0,             ///< sequential, nearest first
  ByAcceptance = 1,         ///< sequential, highest acceptance probability first
  ConcurrentProximity = 2,  ///< rounds of m simultaneous requests, nearest first
  ConcurrentAcceptance = 3, ///< rounds of m, highest acceptance probability first
};

struct PlacementPolicy {
  PolicyKind kind = PolicyKind::Baseline;
  int fanout = 1;  ///< requests per round; only >1 for the concurrent kinds

  bool concurrent() const {
    return kind == PolicyKind::ConcurrentProximity || kind == PolicyKind::ConcurrentAcceptance;
  }
  bool by_acceptance() const {
    return kind == PolicyKind::ByAcceptance || kind == PolicyKind::ConcurrentAcceptance;
  }
  bool operator==(const PlacementPolicy&) const = default;
};

/// Canonical text forms: "baseline", "by-acceptance",
/// "concurrent-proximity:m", "concurrent-acceptance:m".
std::string to_string(const PlacementPolicy& p);
PlacementPolicy parse_policy(const std::string& text);  // throws ParseError

// ---------------------------------------------------------------------------
// Region roster
// ---------------------------------------------------------------------------

/// Weekly arrival-rate profile: expected patients *per day* needing an
/// inpatient bed, by day of week (index 0 = Monday).
using DailyRates = std::array<double, util::kDaysPerWeek>;

/// An emergency department generating placement demand.
struct EmergencyDept {
  std::string ed_id;
  DailyRates daily_rates{};  ///< patients/day needing an inpatient bed
  bool operator==(const EmergencyDept&) const = default;
};

/// One inpatient psychiatric unit.
struct IpUnit {
  std::string unit_id;
  std::string facility_id;            ///< owning facility (filled on load)
  std::vector<AgeGroup> licensed_ages;
  int bed_count = 0;
  double accept_prob = 1.0;       ///< chance a referral to this unit is accepted
  double mean_review_hours = 0.0; ///< mean time to review one referral
  double mean_los_hours = 0.0;    ///< mean inpatient length of stay
  double non_ed_rate = 0.0;       ///< direct admissions per day (not via any ED)

  bool licensed_for(AgeGroup g) const;
  bool operator==(const IpUnit&) const = default;
};

/// A hospital: optionally an ED, plus zero or more inpatient units.
struct Facility {
  std::string facility_id;
  std::string name;
  bool is_reference = false;  ///< the facility whose data calibrated the model
  std::optional<EmergencyDept> ed;
  std::vector<IpUnit> ip_units;
  bool operator==(const Facility&) const = default;
};

/// Pairwise ED-to-unit travel: drive time (hours) and distance (miles).
/// Stored dense over (ed, unit) index pairs; ids are in roster order.
class TravelMatrix {
 public:
  TravelMatrix() = default;
  TravelMatrix(std::vector<std::string> ed_ids, std::vector<std::string> unit_ids);

  void set(const std::string& ed_id, const std::string& unit_id, double drive_hours,
           double distance_miles);

  // Id-based lookups (throw ValidationError on unknown ids).
  double drive_hours(const std::string& ed_id, const std::string& unit_id) const;
  double distance_miles(const std::string& ed_id, const std::string& unit_id) const;

  // Index-based lookups for the simulation hot path.
  std::size_t ed_index(const std::string& ed_id) const;
  std::size_t unit_index(const std::string& unit_id) const;
  double drive_hours_at(std::size_t ed, std::size_t unit) const {
    return drive_[ed * unit_ids_.size() + unit];
  }
  double distance_miles_at(std::size_t ed, std::size_t unit) const {
    return miles_[ed * unit_ids_.size() + unit];
  }

  const std::vector<std::string>& ed_ids() const { return ed_ids_; }
  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  bool complete() const;  ///< every (ed, unit) pair assigned

  bool operator==(const TravelMatrix&) const = default;

 private:
  std::vector<std::string> ed_ids_;
  std::vector<std::string> unit_ids_;
  std::vector<double> drive_;  // -1 = unset
  std::vector<double> miles_;
};

// ---------------------------------------------------------------------------
// Sampling inputs
// ---------------------------------------------------------------------------

struct TriangularSpec {
  double min = 0.0, mode = 0.0, max = 0.0;
  bool operator==(const TriangularSpec&) const = default;
};

/// Region-wide sampling inputs shared by all units.
struct DistributionInputs {
  /// Empirical inpatient length-of-stay pool (hours) from the reference
  /// facility; unit stays are resampled from it and rescaled by unit mean.
  std::vector<double> los_samples_hours;
  double reference_mean_los_hours = 0.0;  ///< mean the pool is scaled against

  /// Patient acuity in [0,1]; a referral is accepted when acuity is below
  /// the unit's acceptance probability.
  TriangularSpec acuity;

  /// Regional age-band mix (probabilities summing to 1).
  std::array<double, kAgeGroupCount> age_mix{};

  bool operator==(const DistributionInputs&) const = default;
};

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// A fully parameterized experiment scenario: the region roster plus run
/// controls. This is the root object serialized to/from disk.
struct ScenarioConfig {
  std::string name;

  int horizon_days = 365;
  int warmup_days = 30;
  int replications = 20;
  std::uint64_t seed = 1;
  double rate_multiplier = 1.0;  ///< scales every ED arrival rate
  double los_multiplier = 1.0;   ///< scales every sampled length of stay
  PlacementPolicy policy;

  std::vector<Facility> facilities;
  TravelMatrix travel;
  DistributionInputs dists;

  // Convenience accessors over the roster (stable roster order).
  std::vector<const EmergencyDept*> eds() const;
  std::vector<const IpUnit*> units() const;
  const Facility* facility(const std::string& facility_id) const;  // nullptr if absent
  const Facility* reference_facility() const;                      // nullptr if none

  double horizon_hours() const { return horizon_days * 24.0; }
  double warmup_hours() const { return warmup_days * 24.0; }

  bool operator==(const ScenarioConfig&) const = default;
};

}  // namespace psychflow

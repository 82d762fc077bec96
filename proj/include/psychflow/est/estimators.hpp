#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "psychflow/errors.hpp"
#include "psychflow/scenario/types.hpp"

namespace psychflow::est {

struct EstimatorError : Error {
  using Error::Error;
};
/// An input log contained no usable rows.
struct EmptyLog : EstimatorError {
  using EstimatorError::EstimatorError;
};
/// A roster facility/ED has no matching row in the capacity survey.
struct MissingFacility : EstimatorError {
  using EstimatorError::EstimatorError;
};
/// The designated reference unit is absent from the capacity survey.
struct MissingReferenceUnit : EstimatorError {
  using EstimatorError::EstimatorError;
};
/// The reference unit reports zero annual admissions, so nothing can be
/// scaled against it.
struct ZeroReferenceVolume : EstimatorError {
  using EstimatorError::EstimatorError;
};
/// A unit reports patient-days but zero admissions.
struct ZeroAdmissions : EstimatorError {
  using EstimatorError::EstimatorError;
};

// ---------------------------------------------------------------------------
// Input tables
// ---------------------------------------------------------------------------

/// Reference-ED registration log: one row per ED visit, flagged when the
/// visit needed an inpatient psychiatric bed.
struct EdVisitLog {
  struct Row {
    std::int64_t day_serial = 0;  ///< civil day of the registration
    double hour = 0.0;
    bool needs_ip = false;
  };
  std::vector<Row> rows;
};

/// Referral log from the reference facility's placement coordinators: one
/// row per request sent to a receiving facility.
struct TransferLog {
  struct Row {
    std::string patient_id;
    std::string facility_id;   ///< facility the request went to
    double sent_hours = 0.0;   ///< when the request was sent (epoch hours)
    double answer_hours = 0.0; ///< when the answer came back
    bool accepted = false;
  };
  std::vector<Row> rows;
};

/// Annual capacity survey: facility ED volume plus per-unit admissions,
/// patient-days and bed counts. Unit fields may be blank for ED-only rows.
struct HccisRow {
  std::string facility_id;
  long long annual_ed_registrations = 0;
  std::string unit_id;  ///< empty when the row only reports ED volume
  long long annual_admissions = 0;
  double annual_patient_days = 0.0;
  int beds = 0;
};
struct HccisTable {
  std::vector<HccisRow> rows;

  const HccisRow* unit(const std::string& unit_id) const;  // nullptr if absent
  /// Annual ED registrations for a facility; MissingFacility if absent.
  long long ed_registrations(const std::string& facility_id) const;
  bool has_facility(const std::string& facility_id) const;
};

// header: timestamp,needs_ip ; timestamps must be non-decreasing
EdVisitLog load_ed_visit_log(const std::string& path);
// header: patient_id,facility_id,t1,t2,decision ; t2 >= t1, decision accept/reject
TransferLog load_transfer_log(const std::string& path);
// header: facility_id,annual_ed_registrations,unit_id,annual_admissions,
//         annual_patient_days,beds
HccisTable load_hccis(const std::string& path);

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Share of daily ED registrations that need an inpatient bed, by weekday:
/// (mean count of flagged visits on weekday d) / mean_daily_registrations.
/// The log must span at least one full week.
DailyRates estimate_ed_proportions(const EdVisitLog& log, double mean_daily_registrations);

/// Expected bed-seekers per day for each surveyed facility with an ED:
/// proportions[d] * annual_registrations / 365.
std::map<std::string, DailyRates> estimate_ed_rates(const DailyRates& proportions,
                                                    const HccisTable& hccis);

/// Direct (non-ED) admission rate per unit, scaled off the reference
/// unit's observed rate by annual admission volume.
std::map<std::string, double> estimate_non_ed_rates(const HccisTable& hccis,
                                                    double reference_non_ed_rate,
                                                    const std::string& reference_unit_id);

/// Mean length of stay (hours) per unit: patient_days * 24 / admissions.
/// Units reporting neither admissions nor patient-days are omitted.
std::map<std::string, double> estimate_mean_los(const HccisTable& hccis);

/// Mean referral review time (hours) per receiving facility.
std::map<std::string, double> estimate_review_time(const TransferLog& log);

/// Acceptance probability per receiving facility: accepted / contacted
/// (every request counts, including repeat contacts for one patient).
std::map<std::string, double> estimate_accept_prob(const TransferLog& log);

// ---------------------------------------------------------------------------
// Parameter overlay
// ---------------------------------------------------------------------------

/// One derived parameter with its provenance.
struct ParamValue {
  double value = 0.0;
  bool estimated = false;  ///< false = documented default applied
  bool operator==(const ParamValue&) const = default;
};

struct UnitOverlay {
  ParamValue non_ed_rate;
  ParamValue mean_los_hours;
  ParamValue accept_prob;
  ParamValue mean_review_hours;
  bool operator==(const UnitOverlay&) const = default;
};

/// The full set of derived scenario parameters plus coverage notes for
/// every value that had to fall back to a default.
struct ScenarioOverlay {
  std::string reference_facility_id;
  std::string reference_unit_id;
  ParamValue reference_mean_los_hours;
  std::map<std::string, DailyRates> ed_daily_rates;  ///< facility -> rates
  std::map<std::string, UnitOverlay> units;
  std::vector<std::string> coverage_gaps;
  bool operator==(const ScenarioOverlay&) const = default;
};

// Documented fallbacks when a facility never appears in the referral log
// (or no log data exists at all to average).
inline constexpr double kDefaultReviewHours = 1.0;
inline constexpr double kDefaultAcceptProb = 0.5;
inline constexpr double kDefaultMeanLosHours = 120.0;

struct EstimationInputs {
  EdVisitLog ed_log;
  TransferLog transfer_log;
  HccisTable hccis;
  double mean_daily_registrations = 0.0;  ///< reference ED daily volume
  std::string reference_facility_id;
  std::string reference_unit_id;
  double reference_non_ed_rate = 0.0;  ///< observed direct admissions/day
};

/// Runs every estimator and assembles the overlay. Parameters that cannot
/// be estimated get regional-mean (or documented constant) defaults and a
/// coverage-gap note; nothing is silently invented.
ScenarioOverlay build_scenario_params(const EstimationInputs& inputs);

std::string overlay_to_json(const ScenarioOverlay& overlay);
ScenarioOverlay parse_overlay_json(const std::string& text, const std::string& origin);

/// Copies overlay values onto a scenario roster in place. Every roster ED
/// facility and unit must be covered (MissingFacility otherwise); the
/// reference unit's stay mean must be present (MissingReferenceUnit).
void apply_overlay(ScenarioConfig& cfg, const ScenarioOverlay& overlay);

}  // namespace psychflow::est

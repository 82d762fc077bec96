#pragma once

#include <span>
#include <string>
#include <vector>

#include "psychflow/flow/simulation.hpp"
#include "psychflow/metrics/records.hpp"

namespace psychflow::metrics {

/// One row of aggregate outcomes. Every field is a double so the whole row
/// can be walked generically (CSV columns, pooling, confidence intervals);
/// count-like fields hold integral values. Empty cohorts yield NaN, which
/// serializes as an empty cell.
///
/// Cohort fields cover ED-origin patients who reached a bed. The naming grid
/// is metric_stat_cohort_scope with cohorts all / vuln (child, adolescent,
/// geriatric) / adult and scopes placed (any destination) / internal (own
/// facility) / transferred (another facility). Coordination is disposition
/// to bed secured; delay additionally includes travel.
struct SummaryReport {
  // Population counts (per replication; pooled rows report per-rep means).
  double patients = 0;
  double ed_patients = 0;
  double direct_patients = 0;
  double placed_ed_patients = 0;
  double censored_count = 0;
  double censored_pct = 0;

  double coord_mean_all_placed = 0, coord_mean_all_internal = 0, coord_mean_all_transferred = 0;
  double coord_mean_vuln_placed = 0, coord_mean_vuln_internal = 0, coord_mean_vuln_transferred = 0;
  double coord_mean_adult_placed = 0, coord_mean_adult_internal = 0, coord_mean_adult_transferred = 0;
  double coord_median_all_placed = 0, coord_median_all_internal = 0, coord_median_all_transferred = 0;
  double coord_median_vuln_placed = 0, coord_median_vuln_internal = 0, coord_median_vuln_transferred = 0;
  double coord_median_adult_placed = 0, coord_median_adult_internal = 0, coord_median_adult_transferred = 0;
  double delay_mean_all_placed = 0, delay_mean_all_internal = 0, delay_mean_all_transferred = 0;
  double delay_mean_vuln_placed = 0, delay_mean_vuln_internal = 0, delay_mean_vuln_transferred = 0;
  double delay_mean_adult_placed = 0, delay_mean_adult_internal = 0, delay_mean_adult_transferred = 0;
  double delay_median_all_placed = 0, delay_median_all_internal = 0, delay_median_all_transferred = 0;
  double delay_median_vuln_placed = 0, delay_median_vuln_internal = 0, delay_median_vuln_transferred = 0;
  double delay_median_adult_placed = 0, delay_median_adult_internal = 0, delay_median_adult_transferred = 0;

  // Share of placed ED patients sent to another facility, by cohort (%).
  double pct_transferred_all = 0;
  double pct_transferred_vuln = 0;
  double pct_transferred_adult = 0;

  // Distance to the receiving unit (miles; 0 for internal placements).
  double distance_mean_placed = 0;
  double distance_mean_transferred = 0;
  double pct_within10_all = 0, pct_within25_all = 0, pct_within50_all = 0;
  double pct_within10_vuln = 0, pct_within25_vuln = 0, pct_within50_vuln = 0;
  double pct_within10_adult = 0, pct_within25_adult = 0, pct_within50_adult = 0;

  // Post-warm-up bed occupancy (fraction of capacity). Group figures pool
  // every unit licensed for that band, weighted by bed-hours.
  double occupancy_overall = 0;
  double occupancy_child = 0;
  double occupancy_adolescent = 0;
  double occupancy_adult = 0;
  double occupancy_geriatric = 0;

  // Flows touching the reference facility (patients/day, post-warm-up).
  double daily_transfers_to_reference = 0;
  double daily_transfers_from_reference_ed = 0;

  // Referral effort over placed ED patients.
  double attempts_mean_placed = 0;        ///< bed searches per patient
  double requests_mean_placed = 0;        ///< referral requests, all searches
  double final_requests_mean_placed = 0;  ///< requests within the winning search

  double direct_wait_mean_hours = 0;  ///< queue wait of placed direct admissions
  double los_mean_placed = 0;         ///< mean length of stay, placed ED patients
};

/// Name + member pointer for every SummaryReport field, in column order.
struct SummaryField {
  const char* name;
  double SummaryReport::* field;
};

std::span<const SummaryField> summary_fields();

/// Aggregates records and unit totals into one report row.
///
/// `replications` divides count-like and per-day fields so a concatenation
/// of R replications pools into per-replication figures; pass 1 for a
/// single-replication row. Unit totals may likewise contain one entry per
/// unit per replication.
SummaryReport summarize(const std::vector<PatientRecord>& records,
                        const std::vector<flow::UnitTotals>& units,
                        const std::string& reference_facility_id,
                        double warmup_hours, double horizon_hours,
                        int replications = 1);

/// Per-rep rows + a pooled row in one container (pooled last).
struct SummaryTable {
  std::vector<SummaryReport> per_replication;
  SummaryReport pooled;
  SummaryReport ci95_half_width;  ///< t-based over the per-replication rows
};

SummaryTable build_summary_table(const std::vector<flow::ReplicationResult>& reps,
                                 const std::string& reference_facility_id);

/// summary.csv: one row per replication plus a "pooled" row; every field
/// column is followed by a `<field>_ci95hw` column filled only for pooled.
std::string summary_table_csv(const SummaryTable& table);

/// Compact human-readable digest of the pooled row.
std::string summary_table_text(const SummaryTable& table, const std::string& title);

}  // namespace psychflow::metrics

#include "psychflow/metrics/summary.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "psychflow/stats/tests.hpp"
#include "psychflow/util/csv.hpp"

namespace psychflow::metrics {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::array<SummaryField, 68> kFields = {{
    {"patients", &SummaryReport::patients},
    {"ed_patients", &SummaryReport::ed_patients},
    {"direct_patients", &SummaryReport::direct_patients},
    {"placed_ed_patients", &SummaryReport::placed_ed_patients},
    {"censored_count", &SummaryReport::censored_count},
    {"censored_pct", &SummaryReport::censored_pct},
    {"coord_mean_all_placed", &SummaryReport::coord_mean_all_placed},
    {"coord_mean_all_internal", &SummaryReport::coord_mean_all_internal},
    {"coord_mean_all_transferred", &SummaryReport::coord_mean_all_transferred},
    {"coord_mean_vuln_placed", &SummaryReport::coord_mean_vuln_placed},
    {"coord_mean_vuln_internal", &SummaryReport::coord_mean_vuln_internal},
    {"coord_mean_vuln_transferred", &SummaryReport::coord_mean_vuln_transferred},
    {"coord_mean_adult_placed", &SummaryReport::coord_mean_adult_placed},
    {"coord_mean_adult_internal", &SummaryReport::coord_mean_adult_internal},
    {"coord_mean_adult_transferred", &SummaryReport::coord_mean_adult_transferred},
    {"coord_median_all_placed", &SummaryReport::coord_median_all_placed},
    {"coord_median_all_internal", &SummaryReport::coord_median_all_internal},
    {"coord_median_all_transferred", &SummaryReport::coord_median_all_transferred},
    {"coord_median_vuln_placed", &SummaryReport::coord_median_vuln_placed},
    {"coord_median_vuln_internal", &SummaryReport::coord_median_vuln_internal},
    {"coord_median_vuln_transferred", &SummaryReport::coord_median_vuln_transferred},
    {"coord_median_adult_placed", &SummaryReport::coord_median_adult_placed},
    {"coord_median_adult_internal", &SummaryReport::coord_median_adult_internal},
    {"coord_median_adult_transferred", &SummaryReport::coord_median_adult_transferred},
    {"delay_mean_all_placed", &SummaryReport::delay_mean_all_placed},
    {"delay_mean_all_internal", &SummaryReport::delay_mean_all_internal},
    {"delay_mean_all_transferred", &SummaryReport::delay_mean_all_transferred},
    {"delay_mean_vuln_placed", &SummaryReport::delay_mean_vuln_placed},
    {"delay_mean_vuln_internal", &SummaryReport::delay_mean_vuln_internal},
    {"delay_mean_vuln_transferred", &SummaryReport::delay_mean_vuln_transferred},
    {"delay_mean_adult_placed", &SummaryReport::delay_mean_adult_placed},
    {"delay_mean_adult_internal", &SummaryReport::delay_mean_adult_internal},
    {"delay_mean_adult_transferred", &SummaryReport::delay_mean_adult_transferred},
    {"delay_median_all_placed", &SummaryReport::delay_median_all_placed},
    {"delay_median_all_internal", &SummaryReport::delay_median_all_internal},
    {"delay_median_all_transferred", &SummaryReport::delay_median_all_transferred},
    {"delay_median_vuln_placed", &SummaryReport::delay_median_vuln_placed},
    {"delay_median_vuln_internal", &SummaryReport::delay_median_vuln_internal},
    {"delay_median_vuln_transferred", &SummaryReport::delay_median_vuln_transferred},
    {"delay_median_adult_placed", &SummaryReport::delay_median_adult_placed},
    {"delay_median_adult_internal", &SummaryReport::delay_median_adult_internal},
    {"delay_median_adult_transferred", &SummaryReport::delay_median_adult_transferred},
    {"pct_transferred_all", &SummaryReport::pct_transferred_all},
    {"pct_transferred_vuln", &SummaryReport::pct_transferred_vuln},
    {"pct_transferred_adult", &SummaryReport::pct_transferred_adult},
    {"distance_mean_placed", &SummaryReport::distance_mean_placed},
    {"distance_mean_transferred", &SummaryReport::distance_mean_transferred},
    {"pct_within10_all", &SummaryReport::pct_within10_all},
    {"pct_within25_all", &SummaryReport::pct_within25_all},
    {"pct_within50_all", &SummaryReport::pct_within50_all},
    {"pct_within10_vuln", &SummaryReport::pct_within10_vuln},
    {"pct_within25_vuln", &SummaryReport::pct_within25_vuln},
    {"pct_within50_vuln", &SummaryReport::pct_within50_vuln},
    {"pct_within10_adult", &SummaryReport::pct_within10_adult},
    {"pct_within25_adult", &SummaryReport::pct_within25_adult},
    {"pct_within50_adult", &SummaryReport::pct_within50_adult},
    {"occupancy_overall", &SummaryReport::occupancy_overall},
    {"occupancy_child", &SummaryReport::occupancy_child},
    {"occupancy_adolescent", &SummaryReport::occupancy_adolescent},
    {"occupancy_adult", &SummaryReport::occupancy_adult},
    {"occupancy_geriatric", &SummaryReport::occupancy_geriatric},
    {"daily_transfers_to_reference", &SummaryReport::daily_transfers_to_reference},
    {"daily_transfers_from_reference_ed", &SummaryReport::daily_transfers_from_reference_ed},
    {"attempts_mean_placed", &SummaryReport::attempts_mean_placed},
    {"requests_mean_placed", &SummaryReport::requests_mean_placed},
    {"final_requests_mean_placed", &SummaryReport::final_requests_mean_placed},
    {"direct_wait_mean_hours", &SummaryReport::direct_wait_mean_hours},
    {"los_mean_placed", &SummaryReport::los_mean_placed},
}};

double mean_or_nan(const std::vector<double>& v) {
  return v.empty() ? kNan : stats::mean_of(v);
}

double median_or_nan(const std::vector<double>& v) {
  return v.empty() ? kNan : stats::median_of(v);
}

double pct(double part, double whole) {
  return whole > 0 ? 100.0 * part / whole : kNan;
}

/// Cohort filters over placed ED records.
bool in_cohort(const PatientRecord& r, int cohort) {
  switch (cohort) {
    case 0: return true;
    case 1: return r.vulnerable;
    default: return !r.vulnerable;
  }
}

bool in_scope(const PatientRecord& r, int scope) {
  switch (scope) {
    case 0: return true;
    case 1: return !r.transferred;
    default: return r.transferred;
  }
}

std::string cell(double v) { return std::isnan(v) ? "" : fmt::format("{}", v); }

}  // namespace

std::span<const SummaryField> summary_fields() { return kFields; }

SummaryReport summarize(const std::vector<PatientRecord>& records,
                        const std::vector<flow::UnitTotals>& units,
                        const std::string& reference_facility_id,
                        double warmup_hours, double horizon_hours,
                        int replications) {
  if (replications < 1) throw MetricsError("summarize needs replications >= 1");
  const double r_div = replications;
  SummaryReport s;

  std::vector<const PatientRecord*> placed_ed;
  long ed_count = 0, direct_count = 0, censored = 0;
  std::vector<double> direct_waits;
  for (const PatientRecord& r : records) {
    if (r.censored) ++censored;
    if (r.origin == OriginType::Ed) {
      ++ed_count;
      if (!r.censored) placed_ed.push_back(&r);
    } else {
      ++direct_count;
      if (!r.censored) direct_waits.push_back(r.coordination_hours);
    }
  }
  s.patients = static_cast<double>(records.size()) / r_div;
  s.ed_patients = static_cast<double>(ed_count) / r_div;
  s.direct_patients = static_cast<double>(direct_count) / r_div;
  s.placed_ed_patients = static_cast<double>(placed_ed.size()) / r_div;
  s.censored_count = static_cast<double>(censored) / r_div;
  s.censored_pct = pct(static_cast<double>(censored), static_cast<double>(records.size()));

  // metric 0 = coordination, 1 = delay; stat 0 = mean, 1 = median.
  double SummaryReport::* grid[2][2][3][3] = {
      {{{&SummaryReport::coord_mean_all_placed, &SummaryReport::coord_mean_all_internal, &SummaryReport::coord_mean_all_transferred},
        {&SummaryReport::coord_mean_vuln_placed, &SummaryReport::coord_mean_vuln_internal, &SummaryReport::coord_mean_vuln_transferred},
        {&SummaryReport::coord_mean_adult_placed, &SummaryReport::coord_mean_adult_internal, &SummaryReport::coord_mean_adult_transferred}},
       {{&SummaryReport::coord_median_all_placed, &SummaryReport::coord_median_all_internal, &SummaryReport::coord_median_all_transferred},
        {&SummaryReport::coord_median_vuln_placed, &SummaryReport::coord_median_vuln_internal, &SummaryReport::coord_median_vuln_transferred},
        {&SummaryReport::coord_median_adult_placed, &SummaryReport::coord_median_adult_internal, &SummaryReport::coord_median_adult_transferred}}},
      {{{&SummaryReport::delay_mean_all_placed, &SummaryReport::delay_mean_all_internal, &SummaryReport::delay_mean_all_transferred},
        {&SummaryReport::delay_mean_vuln_placed, &SummaryReport::delay_mean_vuln_internal, &SummaryReport::delay_mean_vuln_transferred},
        {&SummaryReport::delay_mean_adult_placed, &SummaryReport::delay_mean_adult_internal, &SummaryReport::delay_mean_adult_transferred}},
       {{&SummaryReport::delay_median_all_placed, &SummaryReport::delay_median_all_internal, &SummaryReport::delay_median_all_transferred},
        {&SummaryReport::delay_median_vuln_placed, &SummaryReport::delay_median_vuln_internal, &SummaryReport::delay_median_vuln_transferred},
        {&SummaryReport::delay_median_adult_placed, &SummaryReport::delay_median_adult_internal, &SummaryReport::delay_median_adult_transferred}}}};

  for (int cohort = 0; cohort < 3; ++cohort) {
    for (int scope = 0; scope < 3; ++scope) {
      std::vector<double> coord, delay;
      for (const PatientRecord* r : placed_ed) {
        if (!in_cohort(*r, cohort) || !in_scope(*r, scope)) continue;
        coord.push_back(r->coordination_hours);
        delay.push_back(r->treatment_delay_hours);
      }
      s.*grid[0][0][cohort][scope] = mean_or_nan(coord);
      s.*grid[0][1][cohort][scope] = median_or_nan(coord);
      s.*grid[1][0][cohort][scope] = mean_or_nan(delay);
      s.*grid[1][1][cohort][scope] = median_or_nan(delay);
    }
  }

  double SummaryReport::* pct_transferred[3] = {
      &SummaryReport::pct_transferred_all, &SummaryReport::pct_transferred_vuln,
      &SummaryReport::pct_transferred_adult};
  double SummaryReport::* within[3][3] = {
      {&SummaryReport::pct_within10_all, &SummaryReport::pct_within25_all, &SummaryReport::pct_within50_all},
      {&SummaryReport::pct_within10_vuln, &SummaryReport::pct_within25_vuln, &SummaryReport::pct_within50_vuln},
      {&SummaryReport::pct_within10_adult, &SummaryReport::pct_within25_adult, &SummaryReport::pct_within50_adult}};
  const double bands[3] = {10.0, 25.0, 50.0};
  for (int cohort = 0; cohort < 3; ++cohort) {
    double n = 0, transferred = 0;
    double band_hits[3] = {0, 0, 0};
    for (const PatientRecord* r : placed_ed) {
      if (!in_cohort(*r, cohort)) continue;
      ++n;
      if (r->transferred) ++transferred;
      for (int b = 0; b < 3; ++b) {
        if (r->distance_miles <= bands[b]) ++band_hits[b];
      }
    }
    s.*pct_transferred[cohort] = pct(transferred, n);
    for (int b = 0; b < 3; ++b) s.*within[cohort][b] = pct(band_hits[b], n);
  }

  std::vector<double> dist_placed, dist_transferred, attempts, requests, finals, los;
  for (const PatientRecord* r : placed_ed) {
    dist_placed.push_back(r->distance_miles);
    if (r->transferred) dist_transferred.push_back(r->distance_miles);
    attempts.push_back(r->search_attempts);
    requests.push_back(r->requests_sent);
    finals.push_back(r->final_attempt_requests);
    los.push_back(r->los_hours);
  }
  s.distance_mean_placed = mean_or_nan(dist_placed);
  s.distance_mean_transferred = mean_or_nan(dist_transferred);
  s.attempts_mean_placed = mean_or_nan(attempts);
  s.requests_mean_placed = mean_or_nan(requests);
  s.final_requests_mean_placed = mean_or_nan(finals);
  s.los_mean_placed = mean_or_nan(los);
  s.direct_wait_mean_hours = mean_or_nan(direct_waits);

  const double window = horizon_hours - warmup_hours;
  double busy_all = 0, cap_all = 0;
  double busy_g[kAgeGroupCount] = {}, cap_g[kAgeGroupCount] = {};
  for (const flow::UnitTotals& u : units) {
    busy_all += u.busy_bed_hours;
    cap_all += u.capacity * window;
    for (AgeGroup g : u.licensed_ages) {
      busy_g[static_cast<int>(g)] += u.busy_bed_hours;
      cap_g[static_cast<int>(g)] += u.capacity * window;
    }
  }
  auto occ = [](double busy, double cap) { return cap > 0 ? busy / cap : kNan; };
  s.occupancy_overall = occ(busy_all, cap_all);
  s.occupancy_child = occ(busy_g[0], cap_g[0]);
  s.occupancy_adolescent = occ(busy_g[1], cap_g[1]);
  s.occupancy_adult = occ(busy_g[2], cap_g[2]);
  s.occupancy_geriatric = occ(busy_g[3], cap_g[3]);

  const double window_days = window / 24.0;
  double to_ref = 0, from_ref_ed = 0;
  for (const PatientRecord* r : placed_ed) {
    if (!r->transferred) continue;
    if (r->destination_facility_id == reference_facility_id) ++to_ref;
    if (r->origin_facility_id == reference_facility_id) ++from_ref_ed;
  }
  if (window_days > 0) {
    s.daily_transfers_to_reference = to_ref / window_days / r_div;
    s.daily_transfers_from_reference_ed = from_ref_ed / window_days / r_div;
  } else {
    s.daily_transfers_to_reference = kNan;
    s.daily_transfers_from_reference_ed = kNan;
  }
  return s;
}

SummaryTable build_summary_table(const std::vector<flow::ReplicationResult>& reps,
                                 const std::string& reference_facility_id) {
  if (reps.empty()) throw MetricsError("cannot summarize zero replications");
  const double warmup = reps.front().warmup_hours;
  const double horizon = reps.front().horizon_hours;

  SummaryTable table;
  std::vector<PatientRecord> all_records;
  std::vector<flow::UnitTotals> all_units;
  for (const flow::ReplicationResult& rep : reps) {
    table.per_replication.push_back(
        summarize(rep.records, rep.units, reference_facility_id, warmup, horizon, 1));
    all_records.insert(all_records.end(), rep.records.begin(), rep.records.end());
    all_units.insert(all_units.end(), rep.units.begin(), rep.units.end());
  }
  table.pooled = summarize(all_records, all_units, reference_facility_id, warmup,
                           horizon, static_cast<int>(reps.size()));

  // Interval half-widths from the replication-level values; replications
  // whose cohort was empty (NaN) drop out of that field's interval.
  for (const SummaryField& f : summary_fields()) {
    std::vector<double> vals;
    for (const SummaryReport& row : table.per_replication) {
      const double v = row.*f.field;
      if (!std::isnan(v)) vals.push_back(v);
    }
    table.ci95_half_width.*f.field =
        vals.size() >= 2 ? stats::ci95_half_width(vals) : kNan;
  }
  return table;
}

std::string summary_table_csv(const SummaryTable& table) {
  std::string out;
  std::vector<std::string> header{"replication"};
  for (const SummaryField& f : summary_fields()) {
    header.emplace_back(f.name);
    header.emplace_back(std::string(f.name) + "_ci95hw");
  }
  out += util::csv_line(header);
  out += '\n';
  for (std::size_t i = 0; i < table.per_replication.size(); ++i) {
    std::vector<std::string> row{fmt::format("{}", i)};
    for (const SummaryField& f : summary_fields()) {
      row.push_back(cell(table.per_replication[i].*f.field));
      row.emplace_back("");
    }
    out += util::csv_line(row);
    out += '\n';
  }
  std::vector<std::string> row{"pooled"};
  for (const SummaryField& f : summary_fields()) {
    row.push_back(cell(table.pooled.*f.field));
    row.push_back(cell(table.ci95_half_width.*f.field));
  }
  out += util::csv_line(row);
  out += '\n';
  return out;
}

std::string summary_table_text(const SummaryTable& table, const std::string& title) {
  const SummaryReport& p = table.pooled;
  const SummaryReport& hw = table.ci95_half_width;
  auto line = [&](const char* label, double v, double h, const char* unit) {
    if (std::isnan(v)) return fmt::format("  {:<44} n/a\n", label);
    if (std::isnan(h)) return fmt::format("  {:<44} {:>10.2f} {}\n", label, v, unit);
    return fmt::format("  {:<44} {:>10.2f} +/- {:<8.2f} {}\n", label, v, h, unit);
  };
  std::string out = fmt::format("{}\n{}\n", title, std::string(title.size(), '='));
  out += fmt::format("  replications: {}\n", table.per_replication.size());
  out += line("patients per replication", p.patients, hw.patients, "");
  out += line("ED patients placed", p.placed_ed_patients, hw.placed_ed_patients, "");
  out += line("unplaced at horizon (%)", p.censored_pct, hw.censored_pct, "%");
  out += line("transferred out of origin facility (%)", p.pct_transferred_all,
              hw.pct_transferred_all, "%");
  out += line("coordination, placed ED mean", p.coord_mean_all_placed,
              hw.coord_mean_all_placed, "h");
  out += line("coordination, transferred vulnerable mean", p.coord_mean_vuln_transferred,
              hw.coord_mean_vuln_transferred, "h");
  out += line("coordination, transferred adult mean", p.coord_mean_adult_transferred,
              hw.coord_mean_adult_transferred, "h");
  out += line("treatment delay, placed ED mean", p.delay_mean_all_placed,
              hw.delay_mean_all_placed, "h");
  out += line("distance, transferred mean", p.distance_mean_transferred,
              hw.distance_mean_transferred, "mi");
  out += line("placed within 25 miles (%)", p.pct_within25_all, hw.pct_within25_all, "%");
  out += line("bed occupancy overall", p.occupancy_overall, hw.occupancy_overall, "");
  out += line("transfers into reference facility (/day)", p.daily_transfers_to_reference,
              hw.daily_transfers_to_reference, "");
  out += line("referral requests per placed ED patient", p.requests_mean_placed,
              hw.requests_mean_placed, "");
  return out;
}

}  // namespace psychflow::metrics

#include "psychflow/est/estimators.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <set>

#include "psychflow/util/csv.hpp"
#include "psychflow/util/time.hpp"

namespace psychflow::est {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

EdVisitLog load_ed_visit_log(const std::string& path) {
  util::CsvTable t = util::read_csv(path);
  util::require_header(t, {"timestamp", "needs_ip"});
  EdVisitLog log;
  log.rows.reserve(t.rows.size());
  double prev = -1e300;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    util::Timestamp ts;
    try {
      ts = util::parse_timestamp(t.rows[r][0]);
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}:{}: {}", path, r + 2, e.what()));
    }
    double abs_hours = ts.hours_since_epoch();
    if (abs_hours < prev) {
      throw ValidationError(
          fmt::format("{}:{}: timestamps must be non-decreasing", path, r + 2));
    }
    prev = abs_hours;
    log.rows.push_back({ts.day_serial, ts.hour, util::cell_bool01(t, r, 1)});
  }
  return log;
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

TransferLog load_transfer_log(const std::string& path) {
  util::CsvTable t = util::read_csv(path);
  util::require_header(t, {"patient_id", "facility_id", "t1", "t2", "decision"});
  TransferLog log;
  log.rows.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TransferLog::Row row;
    row.patient_id = t.rows[r][0];
    row.facility_id = t.rows[r][1];
    try {
      row.sent_hours = util::parse_timestamp(t.rows[r][2]).hours_since_epoch();
      row.answer_hours = util::parse_timestamp(t.rows[r][3]).hours_since_epoch();
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}:{}: {}", path, r + 2, e.what()));
    }
    if (row.answer_hours < row.sent_hours) {
      throw ValidationError(
          fmt::format("{}:{}: answer time precedes request time", path, r + 2));
    }
    std::string decision = lower(t.rows[r][4]);
    if (decision == "accept") {
      row.accepted = true;
    } else if (decision == "reject") {
      row.accepted = false;
    } else {
      throw ParseError(fmt::format("{}:{}: decision must be accept or reject (got '{}')", path,
                                   r + 2, t.rows[r][4]));
    }
    log.rows.push_back(std::move(row));
  }
  return log;
}

HccisTable load_hccis(const std::string& path) {
  util::CsvTable t = util::read_csv(path);
  util::require_header(t, {"facility_id", "annual_ed_registrations", "unit_id",
                           "annual_admissions", "annual_patient_days", "beds"});
  HccisTable table;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    HccisRow row;
    row.facility_id = t.rows[r][0];
    row.annual_ed_registrations = util::cell_int(t, r, 1);
    row.unit_id = t.rows[r][2];
    if (!row.unit_id.empty()) {
      row.annual_admissions = util::cell_int(t, r, 3);
      row.annual_patient_days = util::cell_double(t, r, 4);
      row.beds = static_cast<int>(util::cell_int(t, r, 5));
    }
    if (row.annual_ed_registrations < 0 || row.annual_admissions < 0 ||
        row.annual_patient_days < 0.0 || row.beds < 0) {
      throw ValidationError(fmt::format("{}:{}: negative count", path, r + 2));
    }
    table.rows.push_back(std::move(row));
  }
  // A facility's ED volume must be reported consistently across its rows.
  std::map<std::string, long long> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto [it, inserted] = seen.emplace(row.facility_id, row.annual_ed_registrations);
    if (!inserted && it->second != row.annual_ed_registrations) {
      throw ValidationError(
          fmt::format("{}: facility '{}' reports conflicting annual_ed_registrations", path,
                      row.facility_id));
    }
  }
  return table;
}

const HccisRow* HccisTable::unit(const std::string& unit_id) const {
  for (const auto& r : rows) {
    if (!r.unit_id.empty() && r.unit_id == unit_id) return &r;
  }
  return nullptr;
}

long long HccisTable::ed_registrations(const std::string& facility_id) const {
  for (const auto& r : rows) {
    if (r.facility_id == facility_id) return r.annual_ed_registrations;
  }
  throw MissingFacility(fmt::format("facility '{}' absent from capacity survey", facility_id));
}

bool HccisTable::has_facility(const std::string& facility_id) const {
  for (const auto& r : rows) {
    if (r.facility_id == facility_id) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

DailyRates estimate_ed_proportions(const EdVisitLog& log, double mean_daily_registrations) {
  if (log.rows.empty()) throw EmptyLog("ED visit log has no rows");
  if (!(mean_daily_registrations > 0.0)) {
    throw ValidationError("mean daily registrations must be > 0");
  }
  std::int64_t first = log.rows.front().day_serial;
  std::int64_t last = log.rows.front().day_serial;
  for (const auto& r : log.rows) {
    first = std::min(first, r.day_serial);
    last = std::max(last, r.day_serial);
  }
  if (last - first + 1 < util::kDaysPerWeek) {
    throw EstimatorError(fmt::format(
        "ED visit log must span at least one full week (covers {} days)", last - first + 1));
  }
  DailyRates counts{}, occurrences{};
  for (std::int64_t day = first; day <= last; ++day) {
    occurrences[static_cast<std::size_t>(util::weekday_of_serial(day))] += 1.0;
  }
  for (const auto& r : log.rows) {
    if (r.needs_ip) {
      counts[static_cast<std::size_t>(util::weekday_of_serial(r.day_serial))] += 1.0;
    }
  }
  DailyRates proportions{};
  for (std::size_t d = 0; d < proportions.size(); ++d) {
    proportions[d] = counts[d] / occurrences[d] / mean_daily_registrations;
    if (proportions[d] > 1.0) {
      throw EstimatorError(
          fmt::format("{} proportion exceeds 1: flagged visits outnumber registrations",
                      util::kWeekdayNames[d]));
    }
  }
  return proportions;
}

std::map<std::string, DailyRates> estimate_ed_rates(const DailyRates& proportions,
                                                    const HccisTable& hccis) {
  std::map<std::string, DailyRates> out;
  for (const auto& row : hccis.rows) {
    if (out.contains(row.facility_id)) continue;
    DailyRates rates{};
    for (std::size_t d = 0; d < rates.size(); ++d) {
      rates[d] = proportions[d] * static_cast<double>(row.annual_ed_registrations) / 365.0;
    }
    out.emplace(row.facility_id, rates);
  }
  return out;
}

std::map<std::string, double> estimate_non_ed_rates(const HccisTable& hccis,
                                                    double reference_non_ed_rate,
                                                    const std::string& reference_unit_id) {
  const HccisRow* ref = hccis.unit(reference_unit_id);
  if (ref == nullptr) {
    throw MissingReferenceUnit(
        fmt::format("reference unit '{}' absent from capacity survey", reference_unit_id));
  }
  if (ref->annual_admissions <= 0) {
    throw ZeroReferenceVolume(
        fmt::format("reference unit '{}' reports no annual admissions", reference_unit_id));
  }
  std::map<std::string, double> out;
  for (const auto& row : hccis.rows) {
    if (row.unit_id.empty()) continue;
    out[row.unit_id] = reference_non_ed_rate * static_cast<double>(row.annual_admissions) /
                       static_cast<double>(ref->annual_admissions);
  }
  return out;
}

std::map<std::string, double> estimate_mean_los(const HccisTable& hccis) {
  std::map<std::string, double> out;
  for (const auto& row : hccis.rows) {
    if (row.unit_id.empty()) continue;
    if (row.annual_admissions == 0) {
      if (row.annual_patient_days > 0.0) {
        throw ZeroAdmissions(fmt::format(
            "unit '{}' reports patient-days but zero admissions", row.unit_id));
      }
      continue;  // nothing observed; left to defaults
    }
    out[row.unit_id] =
        row.annual_patient_days * 24.0 / static_cast<double>(row.annual_admissions);
  }
  return out;
}

std::map<std::string, double> estimate_review_time(const TransferLog& log) {
  if (log.rows.empty()) throw EmptyLog("transfer log has no rows");
  std::map<std::string, std::pair<double, long>> acc;  // facility -> (sum hours, n)
  for (const auto& r : log.rows) {
    auto& a = acc[r.facility_id];
    a.first += r.answer_hours - r.sent_hours;
    a.second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [facility, a] : acc) out[facility] = a.first / static_cast<double>(a.second);
  return out;
}

std::map<std::string, double> estimate_accept_prob(const TransferLog& log) {
  if (log.rows.empty()) throw EmptyLog("transfer log has no rows");
  std::map<std::string, std::pair<long, long>> acc;  // facility -> (accepts, contacts)
  for (const auto& r : log.rows) {
    auto& a = acc[r.facility_id];
    if (r.accepted) ++a.first;
    ++a.second;
  }
  std::map<std::string, double> out;
  for (const auto& [facility, a] : acc) {
    out[facility] = static_cast<double>(a.first) / static_cast<double>(a.second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Overlay
// ---------------------------------------------------------------------------

namespace {

double mean_of_map(const std::map<std::string, double>& m, double fallback) {
  if (m.empty()) return fallback;
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return s / static_cast<double>(m.size());
}

}  // namespace

ScenarioOverlay build_scenario_params(const EstimationInputs& in) {
  ScenarioOverlay overlay;
  overlay.reference_facility_id = in.reference_facility_id;
  overlay.reference_unit_id = in.reference_unit_id;

  DailyRates proportions =
      estimate_ed_proportions(in.ed_log, in.mean_daily_registrations);
  overlay.ed_daily_rates = estimate_ed_rates(proportions, in.hccis);

  auto non_ed = estimate_non_ed_rates(in.hccis, in.reference_non_ed_rate, in.reference_unit_id);
  auto mean_los = estimate_mean_los(in.hccis);
  std::map<std::string, double> review, accept;
  if (!in.transfer_log.rows.empty()) {
    review = estimate_review_time(in.transfer_log);
    accept = estimate_accept_prob(in.transfer_log);
  } else {
    overlay.coverage_gaps.push_back(
        "transfer log empty: review time and acceptance defaults applied everywhere");
  }

  // Regional means serve as defaults for facilities never contacted.
  double default_review = mean_of_map(review, kDefaultReviewHours);
  double default_accept = mean_of_map(accept, kDefaultAcceptProb);
  double default_los = mean_of_map(mean_los, kDefaultMeanLosHours);

  for (const auto& row : in.hccis.rows) {
    if (row.unit_id.empty()) continue;
    UnitOverlay u;
    u.non_ed_rate = {non_ed.at(row.unit_id), true};
    if (auto it = mean_los.find(row.unit_id); it != mean_los.end()) {
      u.mean_los_hours = {it->second, true};
    } else {
      u.mean_los_hours = {default_los, false};
      overlay.coverage_gaps.push_back(
          fmt::format("unit {}: mean_los_hours (no admissions reported)", row.unit_id));
    }
    if (auto it = review.find(row.facility_id); it != review.end()) {
      u.mean_review_hours = {it->second, true};
    } else {
      u.mean_review_hours = {default_review, false};
      overlay.coverage_gaps.push_back(
          fmt::format("unit {}: mean_review_hours (facility {} absent from transfer log)",
                      row.unit_id, row.facility_id));
    }
    if (auto it = accept.find(row.facility_id); it != accept.end()) {
      u.accept_prob = {it->second, true};
    } else {
      u.accept_prob = {default_accept, false};
      overlay.coverage_gaps.push_back(
          fmt::format("unit {}: accept_prob (facility {} absent from transfer log)", row.unit_id,
                      row.facility_id));
    }
    overlay.units.emplace(row.unit_id, u);
  }

  if (auto it = overlay.units.find(in.reference_unit_id); it != overlay.units.end()) {
    overlay.reference_mean_los_hours = it->second.mean_los_hours;
  } else {
    throw MissingReferenceUnit(
        fmt::format("reference unit '{}' absent from capacity survey", in.reference_unit_id));
  }
  return overlay;
}

std::string overlay_to_json(const ScenarioOverlay& o) {
  auto param = [](const ParamValue& p) {
    ordered_json j;
    j["value"] = p.value;
    j["source"] = p.estimated ? "estimate" : "default";
    return j;
  };
  ordered_json j;
  ordered_json ref;
  ref["facility_id"] = o.reference_facility_id;
  ref["unit_id"] = o.reference_unit_id;
  ref["mean_los_hours"] = param(o.reference_mean_los_hours);
  j["reference"] = std::move(ref);
  ordered_json eds;
  for (const auto& [facility, rates] : o.ed_daily_rates) {
    ordered_json jr;
    for (std::size_t d = 0; d < rates.size(); ++d) jr[util::kWeekdayNames[d]] = rates[d];
    eds[facility] = {{"daily_rates", std::move(jr)}, {"source", "estimate"}};
  }
  j["eds"] = std::move(eds);
  ordered_json units;
  for (const auto& [unit_id, u] : o.units) {
    ordered_json ju;
    ju["non_ed_rate"] = param(u.non_ed_rate);
    ju["mean_los_hours"] = param(u.mean_los_hours);
    ju["accept_prob"] = param(u.accept_prob);
    ju["mean_review_hours"] = param(u.mean_review_hours);
    units[unit_id] = std::move(ju);
  }
  j["units"] = std::move(units);
  j["coverage_gaps"] = o.coverage_gaps;
  return j.dump(2) + "\n";
}

ScenarioOverlay parse_overlay_json(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  auto param = [&](const ordered_json& p) {
    ParamValue v;
    v.value = p.at("value").get<double>();
    v.estimated = p.at("source").get<std::string>() == "estimate";
    return v;
  };
  ScenarioOverlay o;
  try {
    const auto& ref = j.at("reference");
    o.reference_facility_id = ref.at("facility_id").get<std::string>();
    o.reference_unit_id = ref.at("unit_id").get<std::string>();
    o.reference_mean_los_hours = param(ref.at("mean_los_hours"));
    for (const auto& [facility, je] : j.at("eds").items()) {
      DailyRates rates{};
      const auto& jr = je.at("daily_rates");
      for (std::size_t d = 0; d < rates.size(); ++d) {
        rates[d] = jr.at(util::kWeekdayNames[d]).get<double>();
      }
      o.ed_daily_rates.emplace(facility, rates);
    }
    for (const auto& [unit_id, ju] : j.at("units").items()) {
      UnitOverlay u;
      u.non_ed_rate = param(ju.at("non_ed_rate"));
      u.mean_los_hours = param(ju.at("mean_los_hours"));
      u.accept_prob = param(ju.at("accept_prob"));
      u.mean_review_hours = param(ju.at("mean_review_hours"));
      o.units.emplace(unit_id, u);
    }
    o.coverage_gaps = j.at("coverage_gaps").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  return o;
}

void apply_overlay(ScenarioConfig& cfg, const ScenarioOverlay& overlay) {
  for (Facility& f : cfg.facilities) {
    if (f.ed) {
      auto it = overlay.ed_daily_rates.find(f.facility_id);
      if (it == overlay.ed_daily_rates.end()) {
        throw MissingFacility(
            fmt::format("no estimated ED rates for facility '{}'", f.facility_id));
      }
      f.ed->daily_rates = it->second;
    }
    for (IpUnit& u : f.ip_units) {
      auto it = overlay.units.find(u.unit_id);
      if (it == overlay.units.end()) {
        throw MissingFacility(fmt::format("no estimated parameters for unit '{}'", u.unit_id));
      }
      u.non_ed_rate = it->second.non_ed_rate.value;
      u.mean_los_hours = it->second.mean_los_hours.value;
      u.accept_prob = it->second.accept_prob.value;
      u.mean_review_hours = it->second.mean_review_hours.value;
    }
  }
  if (!(overlay.reference_mean_los_hours.value > 0.0)) {
    throw MissingReferenceUnit("overlay lacks a usable reference mean length of stay");
  }
  cfg.dists.reference_mean_los_hours = overlay.reference_mean_los_hours.value;
}

}  // namespace psychflow::est

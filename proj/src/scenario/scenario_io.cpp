#include "psychflow/scenario/scenario_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <utility>

#include "psychflow/errors.hpp"
#include "psychflow/util/csv.hpp"
#include "psychflow/util/io.hpp"

namespace psychflow {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string Violation::str() const {
  return fmt::format("{}: {}: {}", entity, field, message);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void missing(const std::string& origin, const std::string& where,
                          const std::string& key) {
  throw ParseError(fmt::format("{}: {}: missing required field '{}'", origin, where, key));
}

const ordered_json& field(const ordered_json& obj, const std::string& origin,
                          const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) missing(origin, where, key);
  return *it;
}

template <typename T>
T get_as(const ordered_json& obj, const std::string& origin, const std::string& where,
         const std::string& key) {
  try {
    return field(obj, origin, where, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}: field '{}': {}", origin, where, key, e.what()));
  }
}

template <typename T>
T get_or(const ordered_json& obj, const std::string& origin, const std::string& where,
         const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(obj, origin, where, key);
}

DailyRates parse_daily_rates(const ordered_json& obj, const std::string& origin,
                             const std::string& where) {
  DailyRates rates{};
  for (int d = 0; d < util::kDaysPerWeek; ++d) {
    rates[static_cast<std::size_t>(d)] =
        get_as<double>(obj, origin, where, util::kWeekdayNames[static_cast<std::size_t>(d)]);
  }
  return rates;
}

IpUnit parse_unit(const ordered_json& j, const std::string& origin,
                  const std::string& facility_id) {
  IpUnit u;
  u.unit_id = get_as<std::string>(j, origin, "ip_unit", "unit_id");
  const std::string where = fmt::format("unit {}", u.unit_id);
  u.facility_id = get_or<std::string>(j, origin, where, "facility_id", facility_id);
  for (const auto& name :
       get_as<std::vector<std::string>>(j, origin, where, "licensed_ages")) {
    try {
      u.licensed_ages.push_back(parse_age_group(name));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}: {}: {}", origin, where, e.what()));
    }
  }
  u.bed_count = get_as<int>(j, origin, where, "bed_count");
  u.accept_prob = get_as<double>(j, origin, where, "accept_prob");
  u.mean_review_hours = get_as<double>(j, origin, where, "mean_review_hours");
  u.mean_los_hours = get_as<double>(j, origin, where, "mean_los_hours");
  u.non_ed_rate = get_as<double>(j, origin, where, "non_ed_rate");
  return u;
}

Facility parse_facility(const ordered_json& j, const std::string& origin) {
  Facility f;
  f.facility_id = get_as<std::string>(j, origin, "facility", "facility_id");
  const std::string where = fmt::format("facility {}", f.facility_id);
  f.name = get_or<std::string>(j, origin, where, "name", f.facility_id);
  f.is_reference = get_or<bool>(j, origin, where, "is_reference", false);
  if (j.contains("ed") && !j.at("ed").is_null()) {
    const auto& je = j.at("ed");
    EmergencyDept ed;
    ed.ed_id = get_as<std::string>(je, origin, where + " ed", "ed_id");
    ed.daily_rates = parse_daily_rates(field(je, origin, where + " ed", "daily_rates"), origin,
                                       fmt::format("ed {}", ed.ed_id));
    f.ed = std::move(ed);
  }
  if (j.contains("ip_units")) {
    const auto& units = j.at("ip_units");
    if (!units.is_array()) {
      throw ParseError(fmt::format("{}: {}: 'ip_units' must be an array", origin, where));
    }
    for (const auto& ju : units) f.ip_units.push_back(parse_unit(ju, origin, f.facility_id));
  }
  return f;
}

}  // namespace

TravelMatrix load_travel_csv(const std::string& path, std::vector<std::string> ed_ids,
                             std::vector<std::string> unit_ids) {
  util::CsvTable t = util::read_csv(path);
  util::require_header(t, {"ed_id", "unit_id", "drive_hours", "distance_miles"});
  TravelMatrix tm(std::move(ed_ids), std::move(unit_ids));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    try {
      tm.set(t.rows[r][0], t.rows[r][1], util::cell_double(t, r, 2), util::cell_double(t, r, 3));
    } catch (const ValidationError& e) {
      throw ParseError(fmt::format("{}:{}: {}", path, r + 2, e.what()));
    }
  }
  return tm;
}

std::vector<double> load_los_samples_csv(const std::string& path) {
  util::CsvTable t = util::read_csv(path);
  util::require_header(t, {"los_hours"});
  std::vector<double> samples;
  samples.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    samples.push_back(util::cell_double(t, r, 0));
  }
  return samples;
}

ScenarioConfig parse_scenario_json(const std::string& json_text, const std::string& origin,
                                   const std::string& base_dir) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }
  if (!j.is_object()) {
    throw ParseError(fmt::format("{}: top level must be a JSON object", origin));
  }

  ScenarioConfig cfg;
  const std::string where = "scenario";
  cfg.name = get_or<std::string>(j, origin, where, "name", "");
  cfg.horizon_days = get_as<int>(j, origin, where, "horizon_days");
  cfg.warmup_days = get_as<int>(j, origin, where, "warmup_days");
  cfg.replications = get_as<int>(j, origin, where, "replications");
  cfg.seed = get_as<std::uint64_t>(j, origin, where, "seed");
  cfg.rate_multiplier = get_or<double>(j, origin, where, "rate_multiplier", 1.0);
  cfg.los_multiplier = get_or<double>(j, origin, where, "los_multiplier", 1.0);
  try {
    cfg.policy = parse_policy(get_as<std::string>(j, origin, where, "policy"));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", origin, e.what()));
  }

  const auto& jf = field(j, origin, where, "facilities");
  if (!jf.is_array()) {
    throw ParseError(fmt::format("{}: 'facilities' must be an array", origin));
  }
  for (const auto& f : jf) cfg.facilities.push_back(parse_facility(f, origin));

  const auto& js = field(j, origin, where, "sampling");
  cfg.dists.reference_mean_los_hours =
      get_as<double>(js, origin, "sampling", "reference_mean_los_hours");
  const auto& jt = field(js, origin, "sampling", "acuity_triangular");
  cfg.dists.acuity.min = get_as<double>(jt, origin, "acuity_triangular", "min");
  cfg.dists.acuity.mode = get_as<double>(jt, origin, "acuity_triangular", "mode");
  cfg.dists.acuity.max = get_as<double>(jt, origin, "acuity_triangular", "max");
  const auto& jm = field(js, origin, "sampling", "age_mix");
  for (AgeGroup g : kAllAgeGroups) {
    cfg.dists.age_mix[static_cast<std::size_t>(g)] =
        get_as<double>(jm, origin, "age_mix", to_string(g));
  }

  // Side files, resolved relative to the scenario file.
  std::vector<std::string> ed_ids, unit_ids;
  for (const auto* ed : cfg.eds()) ed_ids.push_back(ed->ed_id);
  for (const auto* u : cfg.units()) unit_ids.push_back(u->unit_id);
  auto resolve = [&](const std::string& rel) {
    fs::path p(rel);
    if (p.is_absolute() || base_dir.empty()) return rel;
    return (fs::path(base_dir) / p).string();
  };
  cfg.travel = load_travel_csv(resolve(get_as<std::string>(j, origin, where, "travel_csv")),
                               std::move(ed_ids), std::move(unit_ids));
  cfg.dists.los_samples_hours =
      load_los_samples_csv(resolve(get_as<std::string>(j, origin, where, "los_samples_csv")));
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  fs::path p(path);
  ScenarioConfig cfg = parse_scenario_json(util::read_file(path), path,
                                           p.has_parent_path() ? p.parent_path().string() : "");
  auto violations = validate_scenario(cfg);
  if (!violations.empty()) {
    std::string msg = fmt::format("scenario '{}' failed validation:", path);
    for (const auto& v : violations) msg += "\n  - " + v.str();
    throw ValidationError(msg);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string scenario_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["horizon_days"] = cfg.horizon_days;
  j["warmup_days"] = cfg.warmup_days;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["rate_multiplier"] = cfg.rate_multiplier;
  j["los_multiplier"] = cfg.los_multiplier;
  j["policy"] = to_string(cfg.policy);
  j["travel_csv"] = "travel.csv";
  j["los_samples_csv"] = "los_samples.csv";

  ordered_json js;
  js["reference_mean_los_hours"] = cfg.dists.reference_mean_los_hours;
  js["acuity_triangular"] = {{"min", cfg.dists.acuity.min},
                             {"mode", cfg.dists.acuity.mode},
                             {"max", cfg.dists.acuity.max}};
  ordered_json jm;
  for (AgeGroup g : kAllAgeGroups) {
    jm[to_string(g)] = cfg.dists.age_mix[static_cast<std::size_t>(g)];
  }
  js["age_mix"] = std::move(jm);
  j["sampling"] = std::move(js);

  ordered_json jfs = ordered_json::array();
  for (const Facility& f : cfg.facilities) {
    ordered_json jf;
    jf["facility_id"] = f.facility_id;
    jf["name"] = f.name;
    jf["is_reference"] = f.is_reference;
    if (f.ed) {
      ordered_json je;
      je["ed_id"] = f.ed->ed_id;
      ordered_json jr;
      for (int d = 0; d < util::kDaysPerWeek; ++d) {
        jr[util::kWeekdayNames[static_cast<std::size_t>(d)]] =
            f.ed->daily_rates[static_cast<std::size_t>(d)];
      }
      je["daily_rates"] = std::move(jr);
      jf["ed"] = std::move(je);
    }
    ordered_json jus = ordered_json::array();
    for (const IpUnit& u : f.ip_units) {
      ordered_json ju;
      ju["unit_id"] = u.unit_id;
      ju["facility_id"] = u.facility_id;
      ordered_json ages = ordered_json::array();
      for (AgeGroup g : u.licensed_ages) ages.push_back(to_string(g));
      ju["licensed_ages"] = std::move(ages);
      ju["bed_count"] = u.bed_count;
      ju["accept_prob"] = u.accept_prob;
      ju["mean_review_hours"] = u.mean_review_hours;
      ju["mean_los_hours"] = u.mean_los_hours;
      ju["non_ed_rate"] = u.non_ed_rate;
      jus.push_back(std::move(ju));
    }
    jf["ip_units"] = std::move(jus);
    jfs.push_back(std::move(jf));
  }
  j["facilities"] = std::move(jfs);
  return j.dump(2) + "\n";
}

std::string travel_to_csv(const TravelMatrix& tm) {
  std::string out = "ed_id,unit_id,drive_hours,distance_miles\n";
  for (std::size_t e = 0; e < tm.ed_ids().size(); ++e) {
    for (std::size_t u = 0; u < tm.unit_ids().size(); ++u) {
      out += fmt::format("{},{},{},{}\n", util::csv_escape(tm.ed_ids()[e]),
                         util::csv_escape(tm.unit_ids()[u]), tm.drive_hours_at(e, u),
                         tm.distance_miles_at(e, u));
    }
  }
  return out;
}

std::string los_samples_to_csv(const std::vector<double>& samples) {
  std::string out = "los_hours\n";
  for (double v : samples) out += fmt::format("{}\n", v);
  return out;
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  fs::path p(path);
  fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  util::write_file_atomic(path, scenario_to_json(cfg));
  util::write_file_atomic((dir / "travel.csv").string(), travel_to_csv(cfg.travel));
  util::write_file_atomic((dir / "los_samples.csv").string(),
                          los_samples_to_csv(cfg.dists.los_samples_hours));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<Violation> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<Violation> out;
  auto add = [&](std::string entity, std::string field_name, std::string msg) {
    out.push_back({std::move(entity), std::move(field_name), std::move(msg)});
  };

  if (cfg.horizon_days < 1) add("scenario", "horizon_days", "must be >= 1");
  if (cfg.warmup_days < 0) add("scenario", "warmup_days", "must be >= 0");
  if (cfg.warmup_days >= cfg.horizon_days) {
    add("scenario", "warmup_days",
        fmt::format("must be smaller than horizon_days ({} >= {})", cfg.warmup_days,
                    cfg.horizon_days));
  }
  if (cfg.replications < 1) add("scenario", "replications", "must be >= 1");
  if (!(cfg.rate_multiplier > 0.0)) add("scenario", "rate_multiplier", "must be > 0");
  if (!(cfg.los_multiplier > 0.0)) add("scenario", "los_multiplier", "must be > 0");
  if (cfg.policy.fanout < 1) add("scenario", "policy", "request fan-out must be >= 1");

  if (cfg.facilities.empty()) add("scenario", "facilities", "at least one facility required");

  std::set<std::string> facility_ids, unit_ids, ed_ids;
  int references = 0;
  for (const Facility& f : cfg.facilities) {
    const std::string fe = fmt::format("facility {}", f.facility_id);
    if (f.facility_id.empty()) add(fe, "facility_id", "must be non-empty");
    if (!facility_ids.insert(f.facility_id).second) {
      add(fe, "facility_id", "duplicate facility id");
    }
    if (f.is_reference) ++references;
    if (!f.ed && f.ip_units.empty()) {
      add(fe, "ed/ip_units", "facility has neither an ED nor inpatient units");
    }
    if (f.ed) {
      const std::string ee = fmt::format("ed {}", f.ed->ed_id);
      if (f.ed->ed_id.empty()) add(ee, "ed_id", "must be non-empty");
      if (!ed_ids.insert(f.ed->ed_id).second) add(ee, "ed_id", "duplicate ED id");
      for (int d = 0; d < util::kDaysPerWeek; ++d) {
        double r = f.ed->daily_rates[static_cast<std::size_t>(d)];
        if (!(r >= 0.0) || !std::isfinite(r)) {
          add(ee, fmt::format("daily_rates.{}", util::kWeekdayNames[static_cast<std::size_t>(d)]),
              fmt::format("must be a finite value >= 0 (got {})", r));
        }
      }
    }
    for (const IpUnit& u : f.ip_units) {
      const std::string ue = fmt::format("unit {}", u.unit_id);
      if (u.unit_id.empty()) add(ue, "unit_id", "must be non-empty");
      if (!unit_ids.insert(u.unit_id).second) add(ue, "unit_id", "duplicate unit id");
      if (u.facility_id != f.facility_id) {
        add(ue, "facility_id",
            fmt::format("'{}' does not match owning facility '{}'", u.facility_id,
                        f.facility_id));
      }
      if (u.bed_count < 1) add(ue, "bed_count", fmt::format("must be >= 1 (got {})", u.bed_count));
      if (!(u.accept_prob >= 0.0 && u.accept_prob <= 1.0)) {
        add(ue, "accept_prob", fmt::format("must be within [0,1] (got {})", u.accept_prob));
      }
      if (!(u.mean_review_hours >= 0.0)) {
        add(ue, "mean_review_hours", fmt::format("must be >= 0 (got {})", u.mean_review_hours));
      }
      if (!(u.mean_los_hours > 0.0)) {
        add(ue, "mean_los_hours", fmt::format("must be > 0 (got {})", u.mean_los_hours));
      }
      if (!(u.non_ed_rate >= 0.0)) {
        add(ue, "non_ed_rate", fmt::format("must be >= 0 (got {})", u.non_ed_rate));
      }
      if (u.licensed_ages.empty()) add(ue, "licensed_ages", "must list at least one age group");
      std::set<AgeGroup> seen(u.licensed_ages.begin(), u.licensed_ages.end());
      if (seen.size() != u.licensed_ages.size()) {
        add(ue, "licensed_ages", "contains duplicates");
      }
    }
  }
  if (references > 1) {
    add("scenario", "is_reference",
        fmt::format("at most one reference facility allowed (found {})", references));
  }

  // Travel matrix: complete, non-negative, zero exactly for in-house pairs.
  const auto eds = cfg.eds();
  const auto units = cfg.units();
  if (cfg.travel.ed_ids().size() != eds.size() || cfg.travel.unit_ids().size() != units.size() ||
      !cfg.travel.complete()) {
    add("scenario", "travel", "travel matrix must cover every (ED, unit) pair exactly");
  } else {
    auto facility_of_ed = [&](const std::string& ed_id) -> const Facility* {
      for (const Facility& f : cfg.facilities) {
        if (f.ed && f.ed->ed_id == ed_id) return &f;
      }
      return nullptr;
    };
    for (const auto* ed : eds) {
      const Facility* fe = facility_of_ed(ed->ed_id);
      for (const auto* u : units) {
        double tt = cfg.travel.drive_hours(ed->ed_id, u->unit_id);
        double dd = cfg.travel.distance_miles(ed->ed_id, u->unit_id);
        const std::string pe = fmt::format("travel {} -> {}", ed->ed_id, u->unit_id);
        bool in_house = fe != nullptr && u->facility_id == fe->facility_id;
        if (!std::isfinite(tt) || !std::isfinite(dd) || tt < 0.0 || dd < 0.0) {
          add(pe, "drive_hours/distance_miles", "must be finite and >= 0");
        } else if (in_house && (tt != 0.0 || dd != 0.0)) {
          add(pe, "drive_hours/distance_miles", "same-facility pairs must be zero");
        } else if (!in_house && !(tt > 0.0)) {
          add(pe, "drive_hours", "cross-facility pairs must be > 0");
        }
      }
    }
  }

  if (cfg.dists.los_samples_hours.empty()) {
    add("scenario", "los_samples", "empirical stay pool must be non-empty");
  }
  for (double v : cfg.dists.los_samples_hours) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      add("scenario", "los_samples", fmt::format("all stays must be > 0 (got {})", v));
      break;
    }
  }
  if (!(cfg.dists.reference_mean_los_hours > 0.0)) {
    add("scenario", "reference_mean_los_hours", "must be > 0");
  }
  const TriangularSpec& a = cfg.dists.acuity;
  if (!(0.0 <= a.min && a.min <= a.mode && a.mode <= a.max && a.max <= 1.0)) {
    add("scenario", "acuity_triangular",
        fmt::format("requires 0 <= min <= mode <= max <= 1 (got {}, {}, {})", a.min, a.mode,
                    a.max));
  }
  double mix_total = 0.0;
  for (AgeGroup g : kAllAgeGroups) {
    double w = cfg.dists.age_mix[static_cast<std::size_t>(g)];
    if (!(w >= 0.0)) {
      add("scenario", fmt::format("age_mix.{}", to_string(g)), "must be >= 0");
    }
    mix_total += w;
  }
  if (std::abs(mix_total - 1.0) > 1e-6) {
    add("scenario", "age_mix", fmt::format("must sum to 1 (got {})", mix_total));
  }
  return out;
}

}  // namespace psychflow

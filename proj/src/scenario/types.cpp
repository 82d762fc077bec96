#include "psychflow/scenario/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>

#include "psychflow/errors.hpp"

namespace psychflow {

AgeGroup age_group_for_age(int years) {
  if (years < 0) throw ValidationError(fmt::format("negative age {}", years));
  if (years <= 11) return AgeGroup::Child;
  if (years <= 17) return AgeGroup::Adolescent;
  if (years <= 64) return AgeGroup::Adult;
  return AgeGroup::Geriatric;
}

bool is_vulnerable(AgeGroup g) { return g != AgeGroup::Adult; }

std::string to_string(AgeGroup g) {
  switch (g) {
    case AgeGroup::Child: return "child";
    case AgeGroup::Adolescent: return "adolescent";
    case AgeGroup::Adult: return "adult";
    case AgeGroup::Geriatric: return "geriatric";
  }
  return "?";
}

AgeGroup parse_age_group(const std::string& name) {
  for (AgeGroup g : kAllAgeGroups) {
    if (to_string(g) == name) return g;
  }
  throw ParseError(fmt::format("unknown age group '{}'", name));
}

std::string to_string(const PlacementPolicy& p) {
  switch (p.kind) {
    case PolicyKind::Baseline: return "baseline";
    case PolicyKind::ByAcceptance: return "by-acceptance";
    case PolicyKind::ConcurrentProximity: return fmt::format("concurrent-proximity:{}", p.fanout);
    case PolicyKind::ConcurrentAcceptance:
      return fmt::format("concurrent-acceptance:{}", p.fanout);
  }
  return "?";
}

PlacementPolicy parse_policy(const std::string& text) {
  std::string base = text;
  int fanout = 1;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    base = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    char* end = nullptr;
    long v = std::strtol(arg.c_str(), &end, 10);
    if (arg.empty() || end != arg.c_str() + arg.size() || v < 1) {
      throw ParseError(fmt::format("bad request fan-out in policy '{}'", text));
    }
    fanout = static_cast<int>(v);
  }
  PlacementPolicy p;
  p.fanout = fanout;
  if (base == "baseline") {
    p.kind = PolicyKind::Baseline;
  } else if (base == "by-acceptance") {
    p.kind = PolicyKind::ByAcceptance;
  } else if (base == "concurrent-proximity") {
    p.kind = PolicyKind::ConcurrentProximity;
  } else if (base == "concurrent-acceptance") {
    p.kind = PolicyKind::ConcurrentAcceptance;
  } else {
    throw ParseError(fmt::format("unknown placement policy '{}'", text));
  }
  if (!p.concurrent() && p.fanout != 1) {
    throw ParseError(fmt::format("policy '{}' does not take a fan-out", text));
  }
  return p;
}

bool IpUnit::licensed_for(AgeGroup g) const {
  return std::find(licensed_ages.begin(), licensed_ages.end(), g) != licensed_ages.end();
}

TravelMatrix::TravelMatrix(std::vector<std::string> ed_ids, std::vector<std::string> unit_ids)
    : ed_ids_(std::move(ed_ids)),
      unit_ids_(std::move(unit_ids)),
      drive_(ed_ids_.size() * unit_ids_.size(), -1.0),
      miles_(ed_ids_.size() * unit_ids_.size(), -1.0) {}

std::size_t TravelMatrix::ed_index(const std::string& ed_id) const {
  auto it = std::find(ed_ids_.begin(), ed_ids_.end(), ed_id);
  if (it == ed_ids_.end()) {
    throw ValidationError(fmt::format("travel matrix has no ED '{}'", ed_id));
  }
  return static_cast<std::size_t>(it - ed_ids_.begin());
}

std::size_t TravelMatrix::unit_index(const std::string& unit_id) const {
  auto it = std::find(unit_ids_.begin(), unit_ids_.end(), unit_id);
  if (it == unit_ids_.end()) {
    throw ValidationError(fmt::format("travel matrix has no unit '{}'", unit_id));
  }
  return static_cast<std::size_t>(it - unit_ids_.begin());
}

void TravelMatrix::set(const std::string& ed_id, const std::string& unit_id, double drive_hours,
                       double distance_miles) {
  std::size_t i = ed_index(ed_id) * unit_ids_.size() + unit_index(unit_id);
  drive_[i] = drive_hours;
  miles_[i] = distance_miles;
}

double TravelMatrix::drive_hours(const std::string& ed_id, const std::string& unit_id) const {
  return drive_hours_at(ed_index(ed_id), unit_index(unit_id));
}

double TravelMatrix::distance_miles(const std::string& ed_id, const std::string& unit_id) const {
  return distance_miles_at(ed_index(ed_id), unit_index(unit_id));
}

bool TravelMatrix::complete() const {
  return std::none_of(drive_.begin(), drive_.end(), [](double v) { return v < 0.0; });
}

std::vector<const EmergencyDept*> ScenarioConfig::eds() const {
  std::vector<const EmergencyDept*> out;
  for (const auto& f : facilities) {
    if (f.ed) out.push_back(&*f.ed);
  }
  return out;
}

std::vector<const IpUnit*> ScenarioConfig::units() const {
  std::vector<const IpUnit*> out;
  for (const auto& f : facilities) {
    for (const auto& u : f.ip_units) out.push_back(&u);
  }
  return out;
}

const Facility* ScenarioConfig::facility(const std::string& facility_id) const {
  for (const auto& f : facilities) {
    if (f.facility_id == facility_id) return &f;
  }
  return nullptr;
}

const Facility* ScenarioConfig::reference_facility() const {
  for (const auto& f : facilities) {
    if (f.is_reference) return &f;
  }
  return nullptr;
}

}  // namespace psychflow

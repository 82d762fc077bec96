#pragma once

#include <string>
#include <vector>

#include "psychflow/scenario/types.hpp"

namespace psychflow {

/// One semantic problem found in a scenario.
struct Violation {
  std::string entity;   ///< e.g. "unit F03-U1", "facility F07", "scenario"
  std::string field;    ///< offending field name
  std::string message;  ///< what rule was broken

  std::string str() const;
};

/// Checks every semantic rule (ranges, id uniqueness, reference integrity,
/// travel-matrix completeness and same-facility zeroes, distribution
/// sanity). Returns all problems found; empty means valid.
std::vector<Violation> validate_scenario(const ScenarioConfig& cfg);

/// Parses scenario JSON text without validating. Side files named inside
/// (travel and length-of-stay CSVs) are resolved relative to `base_dir`.
/// Throws ParseError with file/field context on malformed input.
ScenarioConfig parse_scenario_json(const std::string& json_text, const std::string& origin,
                                   const std::string& base_dir);

/// Loads and validates a scenario file; ValidationError lists every
/// violation found.
ScenarioConfig load_scenario(const std::string& path);

/// Serializes the config (JSON text only; side files are referenced by
/// their canonical names "travel.csv" and "los_samples.csv").
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Writes the scenario JSON plus its two side CSVs next to it, atomically.
/// load_scenario(path) after save_scenario(cfg, path) compares equal to cfg.
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

/// Reads a drive-time/distance table with header
/// ed_id,unit_id,drive_hours,distance_miles.
TravelMatrix load_travel_csv(const std::string& path, std::vector<std::string> ed_ids,
                             std::vector<std::string> unit_ids);

/// Reads a single-column CSV of stay lengths with header los_hours.
std::vector<double> load_los_samples_csv(const std::string& path);

std::string travel_to_csv(const TravelMatrix& tm);
std::string los_samples_to_csv(const std::vector<double>& samples);

}  // namespace psychflow

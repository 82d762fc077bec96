#pragma once

// Shared scenario builders for tests: a tiny hand-checkable two-facility
// region, plus knobs to derive variants from it.

#include <string>
#include <vector>

#include "psychflow/scenario/types.hpp"

namespace psychflow::testing {

/// Two facilities: F1 (reference) has an ED and one adult unit; F2 has an
/// adult+geriatric unit and no ED. Travel F1-ED -> F2-U one hour / 30 miles.
inline ScenarioConfig tiny_scenario() {
  ScenarioConfig cfg;
  cfg.name = "tiny";
  cfg.horizon_days = 40;
  cfg.warmup_days = 5;
  cfg.replications = 2;
  cfg.seed = 99;

  Facility f1;
  f1.facility_id = "F1";
  f1.name = "Reference Hospital";
  f1.is_reference = true;
  EmergencyDept ed;
  ed.ed_id = "F1-ED";
  ed.daily_rates = {3.0, 3.0, 3.0, 3.0, 3.0, 2.0, 2.0};
  f1.ed = ed;
  IpUnit u1;
  u1.unit_id = "F1-U";
  u1.facility_id = "F1";
  u1.licensed_ages = {AgeGroup::Adult};
  u1.bed_count = 10;
  u1.accept_prob = 0.8;
  u1.mean_review_hours = 1.0;
  u1.mean_los_hours = 96.0;
  u1.non_ed_rate = 0.5;
  f1.ip_units.push_back(u1);

  Facility f2;
  f2.facility_id = "F2";
  f2.name = "Community Hospital";
  IpUnit u2;
  u2.unit_id = "F2-U";
  u2.facility_id = "F2";
  u2.licensed_ages = {AgeGroup::Adult, AgeGroup::Geriatric};
  u2.bed_count = 8;
  u2.accept_prob = 0.6;
  u2.mean_review_hours = 2.0;
  u2.mean_los_hours = 120.0;
  u2.non_ed_rate = 0.25;
  f2.ip_units.push_back(u2);

  cfg.facilities = {f1, f2};

  cfg.travel = TravelMatrix({"F1-ED"}, {"F1-U", "F2-U"});
  cfg.travel.set("F1-ED", "F1-U", 0.0, 0.0);
  cfg.travel.set("F1-ED", "F2-U", 1.0, 30.0);

  cfg.dists.los_samples_hours = {48.0, 72.0, 96.0, 120.0, 144.0};
  cfg.dists.reference_mean_los_hours = 96.0;
  cfg.dists.acuity = {0.0, 0.3, 1.0};
  cfg.dists.age_mix = {0.05, 0.10, 0.70, 0.15};
  return cfg;
}

}  // namespace psychflow::testing

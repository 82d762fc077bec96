// Generates the shipped synthetic region fixture: a reference hospital plus
// 99 community emergency departments and 40 inpatient psychiatric units
// spread over a plane, with travel worked out from coordinates. Everything
// is seeded, so regenerating produces byte-identical files.
//
// Usage: make_fixture [output-dir]   (default "fixtures")

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "psychflow/scenario/scenario_io.hpp"
#include "psychflow/scenario/types.hpp"
#include "psychflow/util/io.hpp"

using namespace psychflow;

namespace {

constexpr std::uint64_t kGeneratorSeed = 20260814;
constexpr double kRoadFactor = 1.25;    // straight line -> road miles
constexpr double kDriveMph = 55.0;
constexpr int kEdCount = 100;           // facilities with an ED (first is reference)
constexpr double kCommunityBedSeekersPerDay = 30.0;  // summed across community EDs

struct Point {
  double x = 0.0, y = 0.0;
};

double miles_between(const Point& a, const Point& b) {
  return kRoadFactor * std::hypot(a.x - b.x, a.y - b.y);
}

/// Weekday demand shape: busiest Monday, quiet weekend (index 0 = Monday).
constexpr std::array<double, 7> kWeekShape = {1.15, 1.10, 1.05, 1.00, 0.95, 0.70, 0.65};

DailyRates shaped_rates(double weekly_mean_per_day) {
  double shape_mean = 0.0;
  for (double s : kWeekShape) shape_mean += s / 7.0;
  DailyRates rates{};
  for (std::size_t d = 0; d < rates.size(); ++d) {
    rates[d] = weekly_mean_per_day * kWeekShape[d] / shape_mean;
  }
  return rates;
}

/// One unit blueprint; placement onto facilities happens in roster order.
struct UnitPlan {
  std::vector<AgeGroup> ages;
  int beds = 0;
  double gamma = 0.0;       // acceptance probability
  double review_hours = 0.0;
  double non_ed_rate = 0.0; // direct admissions per day
};

std::vector<UnitPlan> community_unit_plans(std::mt19937_64& rng) {
  std::vector<UnitPlan> plans;
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto unii = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  const AgeGroup C = AgeGroup::Child, T = AgeGroup::Adolescent, A = AgeGroup::Adult,
                 G = AgeGroup::Geriatric;

  // 14 adult programs.
  for (int i = 0; i < 14; ++i) {
    plans.push_back({{A}, unii(14, 18), uni(0.55, 0.80), uni(1.2, 2.4), 0.6});
  }
  // 6 adult+geriatric programs.
  for (int i = 0; i < 6; ++i) {
    plans.push_back({{A, G}, unii(16, 20), uni(0.50, 0.75), uni(1.5, 3.0), 0.7});
  }
  // 3 dedicated geriatric programs.
  for (int i = 0; i < 3; ++i) {
    plans.push_back({{G}, unii(10, 14), uni(0.45, 0.70), uni(1.8, 3.3), 0.4});
  }
  // 6 child+adolescent programs.
  for (int i = 0; i < 6; ++i) {
    plans.push_back({{C, T}, unii(10, 14), uni(0.45, 0.70), uni(1.8, 3.6), 0.4});
  }
  // 3 adolescent programs.
  for (int i = 0; i < 3; ++i) {
    plans.push_back({{T}, unii(8, 12), uni(0.45, 0.70), uni(1.5, 3.0), 0.3});
  }
  // 2 children's programs.
  for (int i = 0; i < 2; ++i) {
    plans.push_back({{C}, unii(8, 10), uni(0.45, 0.70), uni(1.8, 3.3), 0.25});
  }
  // 4 large all-age regional programs with strong acceptance records.
  for (int i = 0; i < 4; ++i) {
    plans.push_back({{C, T, A, G}, unii(20, 26), uni(0.80, 0.90), uni(1.2, 2.1), 0.9});
  }
  return plans;  // 38 community units; the reference hospital adds two more
}

ScenarioConfig build_region() {
  std::mt19937_64 rng(kGeneratorSeed);
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  ScenarioConfig cfg;
  cfg.name = "synthetic-region";
  cfg.horizon_days = 365;
  cfg.warmup_days = 30;
  cfg.replications = 20;
  cfg.seed = 1;

  // --- facility coordinates -------------------------------------------------
  std::vector<Point> sites(kEdCount);
  sites[0] = {0.0, 0.0};  // reference hospital at the center
  for (int i = 1; i < kEdCount; ++i) {
    const double radius = uni(5.0, 120.0);
    const double angle = uni(0.0, 2.0 * M_PI);
    sites[i] = {radius * std::cos(angle), radius * std::sin(angle)};
  }

  // --- community demand sizes (normalized to a fixed regional total) --------
  std::vector<double> sizes(kEdCount, 0.0);
  double size_sum = 0.0;
  for (int i = 1; i < kEdCount; ++i) {
    sizes[i] = std::exp(uni(-1.2, 0.8));  // skewed: many small, a few large
    size_sum += sizes[i];
  }

  // --- roster ----------------------------------------------------------------
  const std::vector<UnitPlan> plans = community_unit_plans(rng);
  for (int i = 0; i < kEdCount; ++i) {
    Facility f;
    f.facility_id = fmt::format("F{:03d}", i + 1);
    f.name = i == 0 ? "Reference Hospital" : fmt::format("Community Hospital {}", i + 1);
    f.is_reference = i == 0;

    EmergencyDept ed;
    ed.ed_id = f.facility_id + "-ED";
    if (i == 0) {
      ed.daily_rates = {4.1, 3.9, 3.7, 3.6, 3.4, 2.3, 2.0};
    } else {
      ed.daily_rates =
          shaped_rates(kCommunityBedSeekersPerDay * sizes[i] / size_sum);
    }
    f.ed = ed;

    auto add_unit = [&f](int ordinal, const UnitPlan& plan, double los_mean) {
      IpUnit u;
      u.unit_id = fmt::format("{}-U{}", f.facility_id, ordinal);
      u.facility_id = f.facility_id;
      u.licensed_ages = plan.ages;
      u.bed_count = plan.beds;
      u.accept_prob = plan.gamma;
      u.mean_review_hours = plan.review_hours;
      u.mean_los_hours = los_mean;
      u.non_ed_rate = plan.non_ed_rate;
      f.ip_units.push_back(u);
    };

    if (i == 0) {
      // The reference hospital runs an adult unit and a geriatric unit.
      add_unit(1, {{AgeGroup::Adult}, 22, 0.78, 1.5, 0.6}, 118.0);
      add_unit(2, {{AgeGroup::Geriatric}, 12, 0.70, 1.8, 0.3}, 132.0);
    } else if (static_cast<std::size_t>(i - 1) < plans.size()) {
      // Facilities F002..F039 each host one community unit.
      add_unit(1, plans[static_cast<std::size_t>(i - 1)], uni(95.0, 145.0));
    }
    cfg.facilities.push_back(std::move(f));
  }

  // --- travel matrix ----------------------------------------------------------
  std::vector<std::string> ed_ids;
  std::vector<std::string> unit_ids;
  std::vector<int> unit_site;  // facility index per unit, roster order
  for (int i = 0; i < kEdCount; ++i) {
    const Facility& f = cfg.facilities[static_cast<std::size_t>(i)];
    ed_ids.push_back(f.ed->ed_id);
    for (const IpUnit& u : f.ip_units) {
      unit_ids.push_back(u.unit_id);
      unit_site.push_back(i);
    }
  }
  TravelMatrix tm(ed_ids, unit_ids);
  for (int e = 0; e < kEdCount; ++e) {
    for (std::size_t u = 0; u < unit_ids.size(); ++u) {
      if (unit_site[u] == e) {
        tm.set(ed_ids[static_cast<std::size_t>(e)], unit_ids[u], 0.0, 0.0);
        continue;
      }
      const double miles =
          miles_between(sites[static_cast<std::size_t>(e)],
                        sites[static_cast<std::size_t>(unit_site[u])]);
      const double rounded = std::round(miles * 10.0) / 10.0;
      const double hours = std::round(miles / kDriveMph * 100.0) / 100.0;
      tm.set(ed_ids[static_cast<std::size_t>(e)], unit_ids[u], hours, rounded);
    }
  }
  cfg.travel = std::move(tm);

  // --- sampling inputs ---------------------------------------------------------
  // Empirical-looking stay pool: lognormal, clipped to sane bounds.
  std::lognormal_distribution<double> los(std::log(96.0), 0.55);
  std::vector<double> pool;
  pool.reserve(400);
  for (int i = 0; i < 400; ++i) {
    pool.push_back(std::round(std::clamp(los(rng), 12.0, 600.0) * 10.0) / 10.0);
  }
  double mean = 0.0;
  for (double v : pool) mean += v / static_cast<double>(pool.size());
  cfg.dists.los_samples_hours = std::move(pool);
  cfg.dists.reference_mean_los_hours = std::round(mean * 1000.0) / 1000.0;
  cfg.dists.acuity = {0.0, 0.3, 1.0};
  cfg.dists.age_mix = {0.05, 0.10, 0.70, 0.15};
  return cfg;
}

/// A two-week demonstration data set for the parameter estimators, shaped
/// like the inputs the real pipeline consumes (visit log, referral log,
/// annual survey). Small enough to eyeball.
void write_estimation_demo(const std::string& dir) {
  std::mt19937_64 rng(kGeneratorSeed + 1);

  // Visit log: reference-ED registrations on 14 consecutive days; a handful
  // per day need an inpatient bed.
  std::string visits = "timestamp,needs_ip\n";
  const std::array<int, 7> flagged_per_weekday = {5, 4, 4, 4, 4, 3, 2};
  for (int day = 0; day < 14; ++day) {
    // 2022-08-01 is a Monday, so weekday = day % 7 with Monday first.
    const int dom = 1 + day;
    const int flagged = flagged_per_weekday[static_cast<std::size_t>(day % 7)];
    double hour = 6.0;
    for (int k = 0; k < flagged; ++k) {
      hour += std::uniform_real_distribution<double>(0.5, 3.0)(rng);
      const int h = static_cast<int>(hour);
      const int m = static_cast<int>((hour - h) * 60.0);
      visits += fmt::format("2022-08-{:02d} {:02d}:{:02d},1\n", dom, h, m);
    }
  }
  util::write_file_atomic(dir + "/ed_visits.csv", visits);

  // Referral log: requests from the reference facility's coordinators to
  // three receiving facilities with distinct review/acceptance behavior.
  struct Profile {
    const char* facility;
    double mean_review;
    double accept;
    int n;
  };
  const std::array<Profile, 3> profiles = {{{"F002", 1.0, 0.8, 20},
                                            {"F014", 2.0, 0.6, 15},
                                            {"F037", 3.0, 0.4, 10}}};
  std::string transfers = "patient_id,facility_id,t1,t2,decision\n";
  int pid = 0;
  double clock = 8.0;
  for (const Profile& p : profiles) {
    for (int k = 0; k < p.n; ++k) {
      const double review =
          std::uniform_real_distribution<double>(0.5 * p.mean_review, 1.5 * p.mean_review)(rng);
      const bool accept = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p.accept;
      const int day = 1 + (pid % 14);
      const int h1 = static_cast<int>(clock), m1 = static_cast<int>((clock - h1) * 60.0);
      const double t2 = clock + review;
      const int h2 = static_cast<int>(t2), m2 = static_cast<int>((t2 - h2) * 60.0);
      transfers += fmt::format("p{:03d},{},2022-08-{:02d} {:02d}:{:02d},2022-08-{:02d} {:02d}:{:02d},{}\n",
                               ++pid, p.facility, day, h1, m1, day, h2, m2,
                               accept ? "accept" : "reject");
      clock += 0.35;
      if (clock > 18.0) clock = 8.0;
    }
  }
  util::write_file_atomic(dir + "/transfers.csv", transfers);

  // Annual survey covering the reference facility and the three above.
  std::string hccis =
      "facility_id,annual_ed_registrations,unit_id,annual_admissions,"
      "annual_patient_days,beds\n";
  hccis += "F001,65459,F001-U1,1534,7512,22\n";
  hccis += "F001,65459,F001-U2,402,2361,12\n";
  hccis += "F002,24100,F002-U1,980,5530,16\n";
  hccis += "F014,18000,F014-U1,820,4430,14\n";
  hccis += "F037,9000,F037-U1,310,1890,10\n";
  util::write_file_atomic(dir + "/hccis.csv", hccis);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_root = argc > 1 ? argv[1] : "fixtures";
  const std::string region_dir = out_root + "/region";
  const std::string est_dir = out_root + "/estimation";

  const ScenarioConfig cfg = build_region();
  const auto violations = validate_scenario(cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid: " << v.str() << '\n';
    return 1;
  }
  util::ensure_directory(region_dir);
  save_scenario(cfg, region_dir + "/scenario.json");
  std::cout << fmt::format("wrote {}/scenario.json ({} facilities, {} units, {} beds)\n",
                           region_dir, cfg.facilities.size(), cfg.units().size(), [&] {
                             int beds = 0;
                             for (const IpUnit* u : cfg.units()) beds += u->bed_count;
                             return beds;
                           }());

  util::ensure_directory(est_dir);
  write_estimation_demo(est_dir);
  std::cout << fmt::format("wrote estimation demo files under {}\n", est_dir);
  return 0;
}

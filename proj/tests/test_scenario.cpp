#include <doctest.h>

#include <filesystem>
#include <string>

#include "helpers.hpp"
#include "psychflow/errors.hpp"
#include "psychflow/scenario/scenario_io.hpp"
#include "psychflow/scenario/types.hpp"

using namespace psychflow;
namespace fs = std::filesystem;

TEST_CASE("age bands cover every age exactly once") {
  CHECK(age_group_for_age(0) == AgeGroup::Child);
  CHECK(age_group_for_age(11) == AgeGroup::Child);
  CHECK(age_group_for_age(12) == AgeGroup::Adolescent);
  CHECK(age_group_for_age(17) == AgeGroup::Adolescent);
  CHECK(age_group_for_age(18) == AgeGroup::Adult);
  CHECK(age_group_for_age(64) == AgeGroup::Adult);
  CHECK(age_group_for_age(65) == AgeGroup::Geriatric);
  CHECK(age_group_for_age(120) == AgeGroup::Geriatric);
  CHECK_THROWS_AS(age_group_for_age(-1), ValidationError);

  CHECK(is_vulnerable(AgeGroup::Child));
  CHECK(is_vulnerable(AgeGroup::Adolescent));
  CHECK(is_vulnerable(AgeGroup::Geriatric));
  CHECK_FALSE(is_vulnerable(AgeGroup::Adult));

  for (AgeGroup g : kAllAgeGroups) CHECK(parse_age_group(to_string(g)) == g);
  CHECK_THROWS_AS(parse_age_group("toddler"), ParseError);
}

TEST_CASE("policy text forms round-trip") {
  for (const char* text : {"baseline", "by-acceptance", "concurrent-proximity:3",
                           "concurrent-acceptance:2"}) {
    CHECK(to_string(parse_policy(text)) == text);
  }
  CHECK(parse_policy("baseline").fanout == 1);
  CHECK(parse_policy("concurrent-proximity:5").fanout == 5);
  CHECK_THROWS_AS(parse_policy("nearest"), ParseError);
  CHECK_THROWS_AS(parse_policy("baseline:2"), ParseError);
  CHECK_THROWS_AS(parse_policy("concurrent-proximity:0"), ParseError);
  CHECK_THROWS_AS(parse_policy("concurrent-proximity:x"), ParseError);
}

TEST_CASE("a well-formed scenario validates cleanly") {
  auto cfg = testing::tiny_scenario();
  auto violations = validate_scenario(cfg);
  for (const auto& v : violations) MESSAGE(v.str());
  CHECK(violations.empty());
}

TEST_CASE("validation names entity and field for each violation") {
  auto cfg = testing::tiny_scenario();
  cfg.facilities[0].ip_units[0].accept_prob = 1.2;
  auto violations = validate_scenario(cfg);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].entity == "unit F1-U");
  CHECK(violations[0].field == "accept_prob");

  cfg = testing::tiny_scenario();
  cfg.warmup_days = cfg.horizon_days;
  violations = validate_scenario(cfg);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].field == "warmup_days");

  cfg = testing::tiny_scenario();
  cfg.facilities[1].ip_units[0].unit_id = "F1-U";  // duplicate id
  CHECK_FALSE(validate_scenario(cfg).empty());

  cfg = testing::tiny_scenario();
  cfg.travel.set("F1-ED", "F1-U", 0.5, 2.0);  // same facility must be zero
  violations = validate_scenario(cfg);
  REQUIRE_FALSE(violations.empty());
  CHECK(violations[0].entity.find("F1-ED") != std::string::npos);

  cfg = testing::tiny_scenario();
  cfg.dists.age_mix = {0.3, 0.3, 0.3, 0.3};
  violations = validate_scenario(cfg);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].field == "age_mix");

  cfg = testing::tiny_scenario();
  cfg.facilities[0].is_reference = true;
  cfg.facilities[1].is_reference = true;
  violations = validate_scenario(cfg);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].field == "is_reference");
}

TEST_CASE("save then load reproduces the scenario exactly") {
  auto cfg = testing::tiny_scenario();
  fs::path dir = fs::temp_directory_path() / "psychflow_scenario_roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string path = (dir / "scenario.json").string();

  save_scenario(cfg, path);
  ScenarioConfig loaded = load_scenario(path);
  CHECK(loaded == cfg);

  // Round-trip again from the loaded copy: still identical bytes.
  CHECK(scenario_to_json(loaded) == scenario_to_json(cfg));
  fs::remove_all(dir);
}

TEST_CASE("malformed scenario files raise ParseError with context") {
  CHECK_THROWS_AS(parse_scenario_json("{not json", "bad.json", ""), ParseError);

  try {
    parse_scenario_json(R"({"horizon_days": 365})", "bad.json", "");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad.json") != std::string::npos);
    CHECK(msg.find("warmup_days") != std::string::npos);
  }
}

TEST_CASE("loading an invalid scenario raises ValidationError naming the problem") {
  auto cfg = testing::tiny_scenario();
  cfg.facilities[0].ip_units[0].accept_prob = 1.2;
  fs::path dir = fs::temp_directory_path() / "psychflow_scenario_invalid";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string path = (dir / "scenario.json").string();
  save_scenario(cfg, path);
  try {
    load_scenario(path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("F1-U") != std::string::npos);
    CHECK(msg.find("accept_prob") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("travel matrix lookups work by id and by index") {
  auto cfg = testing::tiny_scenario();
  CHECK(cfg.travel.drive_hours("F1-ED", "F2-U") == 1.0);
  CHECK(cfg.travel.distance_miles("F1-ED", "F2-U") == 30.0);
  CHECK(cfg.travel.drive_hours_at(cfg.travel.ed_index("F1-ED"), cfg.travel.unit_index("F1-U")) ==
        0.0);
  CHECK_THROWS_AS(cfg.travel.drive_hours("nope", "F1-U"), ValidationError);
  CHECK(cfg.travel.complete());
}

TEST_CASE("scenario roster accessors preserve declaration order") {
  auto cfg = testing::tiny_scenario();
  auto eds = cfg.eds();
  auto units = cfg.units();
  REQUIRE(eds.size() == 1);
  REQUIRE(units.size() == 2);
  CHECK(units[0]->unit_id == "F1-U");
  CHECK(units[1]->unit_id == "F2-U");
  CHECK(cfg.reference_facility()->facility_id == "F1");
  CHECK(cfg.facility("F2")->name == "Community Hospital");
  CHECK(cfg.facility("F9") == nullptr);
  CHECK(units[1]->licensed_for(AgeGroup::Geriatric));
  CHECK_FALSE(units[0]->licensed_for(AgeGroup::Child));
}

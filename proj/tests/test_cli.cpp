// End-to-end command-line tests: every subcommand is driven through the
// public entry point against real files in a scratch directory, checking
// exit codes, produced artifacts, and byte-level reproducibility.

#include <doctest.h>
#include <fmt/format.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "psychflow/cli/commands.hpp"
#include "psychflow/scenario/scenario_io.hpp"
#include "psychflow/util/csv.hpp"
#include "psychflow/util/io.hpp"
#include "helpers.hpp"

using namespace psychflow;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Fresh scratch directory containing a saved copy of the tiny test region
/// (sized down so a full run takes well under a second).
struct Scratch {
  fs::path dir;
  std::string scenario_path;

  Scratch() {
    dir = fs::temp_directory_path() / "psychflow_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ScenarioConfig cfg = testing::tiny_scenario();
    cfg.horizon_days = 15;
    cfg.warmup_days = 2;
    cfg.replications = 3;
    scenario_path = (dir / "scenario.json").string();
    save_scenario(cfg, scenario_path);
  }
  ~Scratch() { fs::remove_all(dir); }

  std::string path(const std::string& rel) const { return (dir / rel).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(invoke({}).code == 1);                       // no subcommand
  CHECK(invoke({"frobnicate"}).code == 1);           // unknown subcommand
  CHECK(invoke({"run"}).code == 1);                  // missing required flags
  CHECK(invoke({"run", "--bogus"}).code == 1);       // unknown flag
  CHECK(invoke({"validate"}).code == 1);             // missing --scenario
  const CliResult help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Subcommands") != std::string::npos);
}

TEST_CASE("validate reports scenario health") {
  Scratch s;

  const CliResult ok = invoke({"validate", "--scenario", s.scenario_path});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("is valid") != std::string::npos);

  const CliResult missing = invoke({"validate", "--scenario", s.path("nope.json")});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error:") != std::string::npos);

  util::write_file_atomic(s.path("broken.json"), "{ not json");
  const CliResult broken = invoke({"validate", "--scenario", s.path("broken.json")});
  CHECK(broken.code == 1);
  CHECK(broken.err.find("error:") != std::string::npos);
}

TEST_CASE("run writes summaries, metadata, and optional logs") {
  Scratch s;
  const CliResult r = invoke({"run", "--scenario", s.scenario_path, "--out",
                           s.path("out"), "--replications", "2", "--seed", "7",
                           "--patient-log", "--trace"});
  REQUIRE_MESSAGE(r.code == 0, r.err);

  REQUIRE(fs::exists(s.path("out/summary.csv")));
  REQUIRE(fs::exists(s.path("out/summary.txt")));
  REQUIRE(fs::exists(s.path("out/meta.json")));
  REQUIRE(fs::exists(s.path("out/patients.csv")));
  REQUIRE(fs::exists(s.path("out/trace.csv")));

  const auto summary =
      util::parse_csv(util::read_file(s.path("out/summary.csv")), "summary");
  // Two per-replication rows plus the pooled row.
  CHECK(summary.rows.size() == 3);
  CHECK(summary.rows[2][0] == "pooled");

  const auto patients =
      util::parse_csv(util::read_file(s.path("out/patients.csv")), "patients");
  CHECK(patients.header[0] == "replication");
  CHECK(patients.rows.size() > 10);

  const auto trace = util::parse_csv(util::read_file(s.path("out/trace.csv")), "trace");
  CHECK(trace.header == std::vector<std::string>{"replication", "time_hours", "event",
                                                 "entity", "detail"});
  CHECK(trace.rows.size() > 100);

  const std::string meta = util::read_file(s.path("out/meta.json"));
  CHECK(meta.find("\"command\": \"run\"") != std::string::npos);
  CHECK(meta.find("\"seed\": 7") != std::string::npos);
  CHECK(meta.find("\"trace_hash\"") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  Scratch s;
  const std::vector<std::string> args{"run",   "--scenario", s.scenario_path,
                                      "--out", s.path("a"),  "--seed",
                                      "42",    "--replications", "2",
                                      "--patient-log"};
  REQUIRE(invoke(args).code == 0);

  std::vector<std::string> again = args;
  again[4] = s.path("b");
  REQUIRE(invoke(again).code == 0);

  CHECK(util::read_file(s.path("a/summary.csv")) ==
        util::read_file(s.path("b/summary.csv")));
  CHECK(util::read_file(s.path("a/meta.json")) == util::read_file(s.path("b/meta.json")));
  CHECK(util::read_file(s.path("a/patients.csv")) ==
        util::read_file(s.path("b/patients.csv")));

  // A different seed must change the event stream (and thus the metadata).
  std::vector<std::string> reseeded = args;
  reseeded[4] = s.path("c");
  reseeded[6] = "43";
  REQUIRE(invoke(reseeded).code == 0);
  CHECK(util::read_file(s.path("a/meta.json")) != util::read_file(s.path("c/meta.json")));
}

TEST_CASE("flag overrides are re-validated against scenario rules") {
  Scratch s;
  const CliResult r = invoke({"run", "--scenario", s.scenario_path, "--out",
                           s.path("out"), "--horizon-days", "10", "--warmup-days",
                           "30"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(s.path("out/summary.csv")));
}

TEST_CASE("policy and fanout flags reach the simulation") {
  Scratch s;
  const CliResult r = invoke({"run", "--scenario", s.scenario_path, "--out",
                           s.path("out"), "--policy", "concurrent-proximity", "--m",
                           "2", "--replications", "1"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string txt = util::read_file(s.path("out/summary.txt"));
  CHECK(txt.find("concurrent-proximity-m2") != std::string::npos);

  const CliResult bad = invoke({"run", "--scenario", s.scenario_path, "--out",
                             s.path("out2"), "--policy", "warp-speed"});
  CHECK(bad.code == 1);
}

TEST_CASE("compare requires at least two policies") {
  Scratch s;
  const CliResult r = invoke({"compare", "--scenario", s.scenario_path, "--out",
                           s.path("cmp"), "--policy", "baseline"});
  CHECK(r.code == 1);
  CHECK(r.err.find("at least two") != std::string::npos);
}

TEST_CASE("compare writes statistics and per-policy summaries") {
  Scratch s;
  const CliResult r = invoke({"compare", "--scenario", s.scenario_path, "--out",
                           s.path("cmp"), "--policy", "baseline", "--policy",
                           "by-acceptance", "--replications", "3"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  REQUIRE(fs::exists(s.path("cmp/compare.csv")));
  REQUIRE(fs::exists(s.path("cmp/compare_stats.csv")));
  REQUIRE(fs::exists(s.path("cmp/compare.txt")));
  REQUIRE(fs::exists(s.path("cmp/baseline/summary.csv")));
  REQUIRE(fs::exists(s.path("cmp/by-acceptance/summary.csv")));

  const auto stats =
      util::parse_csv(util::read_file(s.path("cmp/compare_stats.csv")), "stats");
  CHECK(stats.header[0] == "metric");
  // 4 metrics x (1 omnibus + 1 pairwise) when data suffices; insufficient
  // cohorts drop their pairwise row but keep the omnibus row.
  CHECK(stats.rows.size() >= 4);
  bool saw_kruskal = false;
  for (const auto& row : stats.rows) saw_kruskal |= row[1] == "kruskal-wallis";
  CHECK(saw_kruskal);
}

TEST_CASE("comparing a policy with itself under shared seeds is a clean null") {
  Scratch s;
  const CliResult r = invoke({"compare", "--scenario", s.scenario_path, "--out",
                           s.path("null"), "--policy", "baseline", "--policy",
                           "baseline", "--crn", "--replications", "3"});
  REQUIRE_MESSAGE(r.code == 0, r.err);

  // The duplicate label gets a numeric suffix so outputs stay separable.
  REQUIRE(fs::exists(s.path("null/baseline/summary.csv")));
  REQUIRE(fs::exists(s.path("null/baseline-2/summary.csv")));
  CHECK(util::read_file(s.path("null/baseline/summary.csv")) ==
        util::read_file(s.path("null/baseline-2/summary.csv")));

  const auto stats =
      util::parse_csv(util::read_file(s.path("null/compare_stats.csv")), "stats");
  int checked = 0;
  for (const auto& row : stats.rows) {
    if (row[4].empty()) continue;  // insufficient-data rows
    CHECK(row[4] == "1");          // identical groups: p exactly 1
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("sweep writes the grid table and per-point directories") {
  Scratch s;
  const CliResult r = invoke({"sweep", "rate", "0.5,1.0", "--scenario", s.scenario_path,
                           "--out", s.path("sw"), "--replications", "2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  REQUIRE(fs::exists(s.path("sw/sweep.csv")));
  REQUIRE(fs::exists(s.path("sw/sweep.txt")));
  REQUIRE(fs::exists(s.path("sw/rate-x0.50/summary.csv")));
  REQUIRE(fs::exists(s.path("sw/rate-x1.00/summary.csv")));

  const auto table = util::parse_csv(util::read_file(s.path("sw/sweep.csv")), "sweep");
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][0] == "rate");
  CHECK(table.rows[0][2] == "0.5");
  CHECK(table.rows[1][2] == "1");

  CHECK(invoke({"sweep", "speed", "1.0", "--scenario", s.scenario_path, "--out",
             s.path("sw2")})
            .code == 1);
  CHECK(invoke({"sweep", "rate", "1.0,abc", "--scenario", s.scenario_path, "--out",
             s.path("sw3")})
            .code == 1);
}

TEST_CASE("a unit-multiplier sweep point reproduces a plain run exactly") {
  Scratch s;
  REQUIRE(invoke({"run", "--scenario", s.scenario_path, "--out", s.path("plain"),
               "--replications", "2", "--seed", "5"})
              .code == 0);
  REQUIRE(invoke({"sweep", "los", "1.0", "--scenario", s.scenario_path, "--out",
               s.path("sw"), "--replications", "2", "--seed", "5"})
              .code == 0);
  // Grid point 0 runs with the base seed and untouched multipliers.
  CHECK(util::read_file(s.path("plain/summary.csv")) ==
        util::read_file(s.path("sw/los-x1.00/summary.csv")));
}

TEST_CASE("estimate derives parameters and can overlay a scenario") {
  Scratch s;

  // Two weeks of reference-ED visits, every listed visit needing a bed.
  std::string visits = "timestamp,needs_ip\n";
  for (int week = 0; week < 2; ++week) {
    for (int day = 0; day < 7; ++day) {
      visits += fmt::format("2022-01-{:02d} 09:00,1\n", 3 + week * 7 + day);
      visits += fmt::format("2022-01-{:02d} 15:30,1\n", 3 + week * 7 + day);
    }
  }
  util::write_file_atomic(s.path("visits.csv"), visits);

  util::write_file_atomic(s.path("transfers.csv"),
                          "patient_id,facility_id,t1,t2,decision\n"
                          "p1,F2,2022-01-03 10:00,2022-01-03 12:00,accept\n"
                          "p2,F2,2022-01-04 08:00,2022-01-04 09:00,reject\n"
                          "p3,F2,2022-01-05 20:00,2022-01-05 23:00,accept\n"
                          "p4,F1,2022-01-06 01:00,2022-01-06 02:00,accept\n");

  util::write_file_atomic(s.path("hccis.csv"),
                          "facility_id,annual_ed_registrations,unit_id,"
                          "annual_admissions,annual_patient_days,beds\n"
                          "F1,36500,F1-U,1000,10000,10\n"
                          "F2,0,F2-U,800,9600,8\n");

  const CliResult r =
      invoke({"estimate", "--ed-log", s.path("visits.csv"), "--transfer-log",
           s.path("transfers.csv"), "--hccis", s.path("hccis.csv"), "--n-rf-ed",
           "100", "--ref-facility", "F1", "--ref-unit", "F1-U",
           "--ref-non-ed-rate", "0.5", "--out", s.path("est"), "--apply-to",
           s.scenario_path});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  REQUIRE(fs::exists(s.path("est/overlay.json")));
  REQUIRE(fs::exists(s.path("est/scenario.json")));

  const ScenarioConfig applied = load_scenario(s.path("est/scenario.json"));
  // Two flagged visits every day against 100 registrations at 100/day
  // volume: each weekday rate lands at 2 patients/day.
  const Facility* ref = applied.reference_facility();
  REQUIRE(ref != nullptr);
  REQUIRE(ref->ed.has_value());
  for (double rate : ref->ed->daily_rates) CHECK(rate == doctest::Approx(2.0));
  // F2's unit review/accept come from its three logged referrals.
  const Facility* f2 = applied.facility("F2");
  REQUIRE(f2 != nullptr);
  CHECK(f2->ip_units[0].accept_prob == doctest::Approx(2.0 / 3.0));
  CHECK(f2->ip_units[0].mean_review_hours == doctest::Approx(2.0));
  // Unit stay means: patient-days * 24 / admissions.
  CHECK(ref->ip_units[0].mean_los_hours == doctest::Approx(240.0));
  CHECK(f2->ip_units[0].mean_los_hours == doctest::Approx(288.0));
  // Direct admissions scale off the reference unit by admission volume.
  CHECK(ref->ip_units[0].non_ed_rate == doctest::Approx(0.5));
  CHECK(f2->ip_units[0].non_ed_rate == doctest::Approx(0.5 * 800.0 / 1000.0));

  const CliResult bad =
      invoke({"estimate", "--ed-log", s.path("visits.csv"), "--transfer-log",
           s.path("transfers.csv"), "--hccis", s.path("hccis.csv"), "--n-rf-ed",
           "100", "--ref-facility", "F9", "--ref-unit", "F9-U",
           "--ref-non-ed-rate", "0.5", "--out", s.path("est2")});
  CHECK(bad.code == 1);
}

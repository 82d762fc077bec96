#include "psychflow/cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "psychflow/errors.hpp"
#include "psychflow/est/estimators.hpp"
#include "psychflow/exp/experiments.hpp"
#include "psychflow/flow/simulation.hpp"
#include "psychflow/metrics/summary.hpp"
#include "psychflow/scenario/scenario_io.hpp"
#include "psychflow/util/io.hpp"

namespace psychflow::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

/// Flags shared by the simulation-running subcommands. Optional values
/// override the loaded scenario when present.
struct CommonFlags {
  std::string scenario_path;
  std::string out_dir;
  std::string policy_text;
  int m = 0;
  int replications = 0;
  int horizon_days = 0;
  int warmup_days = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double rate_multiplier = 0.0;
  double los_multiplier = 0.0;
  bool patient_log = false;
  bool trace = false;
  bool crn = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool wants_policy) {
  cmd->add_option("--scenario", f.scenario_path, "Scenario JSON file")
      ->required();
  cmd->add_option("--out", f.out_dir, "Output directory")->required();
  if (wants_policy) {
    cmd->add_option("--policy", f.policy_text,
                    "Placement policy: baseline, by-acceptance, "
                    "concurrent-proximity, concurrent-acceptance");
  }
  cmd->add_option("--m", f.m, "Requests per round for concurrent policies")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--replications", f.replications, "Replications to run")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--horizon-days", f.horizon_days, "Simulated days per replication")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--warmup-days", f.warmup_days,
                  "Days discarded before measurement starts")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "Base random seed")
      ->capture_default_str()
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--rate-multiplier", f.rate_multiplier,
                  "Scale every ED arrival rate");
  cmd->add_option("--los-multiplier", f.los_multiplier,
                  "Scale every sampled length of stay");
  cmd->add_flag("--patient-log", f.patient_log, "Write per-patient journeys");
  cmd->add_flag("--trace", f.trace, "Write the full event trace (run only)");
  cmd->add_flag("--crn", f.crn,
                "Common random numbers: variants share the base seed");
}

/// Loads the scenario, applies flag overrides, and re-validates.
ScenarioConfig load_with_overrides(const CommonFlags& f) {
  ScenarioConfig cfg = load_scenario(f.scenario_path);
  if (!f.policy_text.empty()) cfg.policy = parse_policy(f.policy_text);
  if (f.m > 0 && cfg.policy.concurrent()) cfg.policy.fanout = f.m;
  if (f.replications > 0) cfg.replications = f.replications;
  if (f.horizon_days > 0) cfg.horizon_days = f.horizon_days;
  if (f.warmup_days >= 0) cfg.warmup_days = f.warmup_days;
  if (f.seed_set) cfg.seed = f.seed;
  if (f.rate_multiplier > 0.0) cfg.rate_multiplier = f.rate_multiplier;
  if (f.los_multiplier > 0.0) cfg.los_multiplier = f.los_multiplier;

  const std::vector<Violation> violations = validate_scenario(cfg);
  if (!violations.empty()) {
    std::string msg = "scenario is invalid after applying flags:";
    for (const Violation& v : violations) msg += "\n  - " + v.str();
    throw ValidationError(msg);
  }
  return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string patients_csv(const std::vector<flow::ReplicationResult>& reps) {
  std::string out = metrics::patient_csv_header();
  out += '\n';
  for (const flow::ReplicationResult& rep : reps) {
    for (const metrics::PatientRecord& r : rep.records) {
      out += metrics::patient_csv_row(r);
      out += '\n';
    }
  }
  return out;
}

ordered_json replication_digests(const std::vector<flow::ReplicationResult>& reps) {
  ordered_json arr = ordered_json::array();
  for (const flow::ReplicationResult& r : reps) {
    ordered_json d;
    d["replication"] = r.replication;
    d["trace_hash"] = fmt::format("{:016x}", r.trace_hash);
    d["events"] = r.events_fired;
    d["patients"] = r.patients_total;
    d["records"] = r.records.size();
    d["censored"] = r.censored;
    d["in_flight_end"] = r.in_flight_end;
    arr.push_back(std::move(d));
  }
  return arr;
}

void write_variant_outputs(const std::string& dir, const ScenarioConfig& cfg,
                           const exp::VariantOutcome& outcome, bool patient_log) {
  const std::string title =
      fmt::format("{} [{}]", cfg.name, outcome.variant.label);
  util::write_file_atomic(join_path(dir, "summary.csv"),
                          metrics::summary_table_csv(outcome.summary));
  util::write_file_atomic(join_path(dir, "summary.txt"),
                          metrics::summary_table_text(outcome.summary, title));
  if (patient_log) {
    util::write_file_atomic(join_path(dir, "patients.csv"),
                            patients_csv(outcome.replications));
  }
}

int cmd_run(const CommonFlags& flags, std::ostream& log) {
  const ScenarioConfig cfg = load_with_overrides(flags);
  const Facility* ref = cfg.reference_facility();
  const std::string ref_id = ref != nullptr ? ref->facility_id : std::string{};

  flow::RunOptions opts;
  opts.seed = cfg.seed;
  std::vector<flow::ReplicationResult> reps;
  std::string trace;
  if (flags.trace) trace = "replication,time_hours,event,entity,detail\n";

  for (int rep = 0; rep < cfg.replications; ++rep) {
    if (flags.trace) {
      opts.trace = [&trace, rep](double t, const sim::EventLabel& l) {
        trace += fmt::format("{},{:.6f},{},{},{}\n", rep, t, l.type, l.entity,
                             l.detail);
      };
    }
    reps.push_back(flow::run_replication(cfg, rep, opts));
    const auto& r = reps.back();
    log << fmt::format("replication {}/{}: {} patients, {} events\n", rep + 1,
                       cfg.replications, r.patients_total, r.events_fired);
  }

  const auto table = metrics::build_summary_table(reps, ref_id);
  const std::string label = exp::policy_label(cfg.policy);
  const std::string title = fmt::format("{} [{}]", cfg.name, label);
  util::write_file_atomic(join_path(flags.out_dir, "summary.csv"),
                          metrics::summary_table_csv(table));
  util::write_file_atomic(join_path(flags.out_dir, "summary.txt"),
                          metrics::summary_table_text(table, title));

  ordered_json meta;
  meta["command"] = "run";
  meta["scenario"] = cfg.name;
  meta["policy"] = label;
  meta["replications"] = cfg.replications;
  meta["horizon_days"] = cfg.horizon_days;
  meta["warmup_days"] = cfg.warmup_days;
  meta["seed"] = cfg.seed;
  meta["rate_multiplier"] = cfg.rate_multiplier;
  meta["los_multiplier"] = cfg.los_multiplier;
  meta["replication_digests"] = replication_digests(reps);
  util::write_file_atomic(join_path(flags.out_dir, "meta.json"), meta.dump(2) + "\n");

  if (flags.patient_log) {
    util::write_file_atomic(join_path(flags.out_dir, "patients.csv"),
                            patients_csv(reps));
  }
  if (flags.trace) {
    util::write_file_atomic(join_path(flags.out_dir, "trace.csv"), trace);
  }
  log << fmt::format("wrote {}\n", join_path(flags.out_dir, "summary.csv"));
  return 0;
}

int cmd_compare(const CommonFlags& flags, const std::vector<std::string>& policies,
                std::ostream& log) {
  if (policies.size() < 2) {
    throw exp::ExperimentError("compare needs at least two --policy values");
  }
  const ScenarioConfig cfg = load_with_overrides(flags);

  exp::ExperimentPlan plan;
  plan.base = cfg;
  plan.crn = flags.crn;
  std::map<std::string, int> label_uses;
  for (const std::string& text : policies) {
    exp::Variant v;
    v.policy = parse_policy(text);
    if (flags.m > 0 && v.policy.concurrent()) v.policy.fanout = flags.m;
    v.label = exp::policy_label(v.policy);
    // Comparing a policy with itself is legal; disambiguate the labels.
    const int n = ++label_uses[v.label];
    if (n > 1) v.label += fmt::format("-{}", n);
    plan.variants.push_back(std::move(v));
  }

  const auto outcomes =
      exp::run_plan(plan, [&log](const std::string& msg) { log << msg << '\n'; });
  const auto report = exp::compare_outcomes(outcomes);

  util::write_file_atomic(join_path(flags.out_dir, "compare.csv"),
                          exp::comparison_csv(outcomes));
  util::write_file_atomic(join_path(flags.out_dir, "compare_stats.csv"),
                          exp::comparison_stats_csv(report));
  util::write_file_atomic(join_path(flags.out_dir, "compare.txt"),
                          exp::comparison_text(report, outcomes));
  for (const exp::VariantOutcome& o : outcomes) {
    write_variant_outputs(join_path(flags.out_dir, o.variant.label), cfg, o,
                          flags.patient_log);
  }
  log << fmt::format("wrote {}\n", join_path(flags.out_dir, "compare_stats.csv"));
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& axis_text,
              const std::string& grid_text, std::ostream& log) {
  const exp::SweepAxis axis = exp::parse_axis(axis_text);
  std::vector<double> grid;
  for (std::size_t pos = 0; pos < grid_text.size();) {
    std::size_t comma = grid_text.find(',', pos);
    if (comma == std::string::npos) comma = grid_text.size();
    const std::string piece = grid_text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
      grid.push_back(v);
    } catch (const std::exception&) {
      throw exp::ExperimentError(
          fmt::format("bad sweep grid entry '{}' (expected numbers like "
                      "0.5,1.0,1.5)",
                      piece));
    }
    pos = comma + 1;
  }

  const ScenarioConfig cfg = load_with_overrides(flags);
  exp::ExperimentPlan plan;
  plan.base = cfg;
  plan.crn = flags.crn;
  plan.variants = exp::sweep_variants(cfg, axis, grid);

  const auto outcomes =
      exp::run_plan(plan, [&log](const std::string& msg) { log << msg << '\n'; });
  util::write_file_atomic(join_path(flags.out_dir, "sweep.csv"),
                          exp::sweep_csv(axis, grid, outcomes));
  util::write_file_atomic(join_path(flags.out_dir, "sweep.txt"),
                          exp::sweep_text(axis, grid, outcomes));
  for (const exp::VariantOutcome& o : outcomes) {
    write_variant_outputs(join_path(flags.out_dir, o.variant.label), cfg, o,
                          flags.patient_log);
  }
  log << fmt::format("wrote {}\n", join_path(flags.out_dir, "sweep.csv"));
  return 0;
}

struct EstimateFlags {
  std::string ed_log_path;
  std::string transfer_log_path;
  std::string hccis_path;
  double n_rf_ed = 0.0;
  std::string ref_facility;
  std::string ref_unit;
  double ref_non_ed_rate = 0.0;
  std::string out_dir;
  std::string apply_to;
};

int cmd_estimate(const EstimateFlags& flags, std::ostream& log) {
  est::EstimationInputs inputs;
  inputs.ed_log = est::load_ed_visit_log(flags.ed_log_path);
  inputs.transfer_log = est::load_transfer_log(flags.transfer_log_path);
  inputs.hccis = est::load_hccis(flags.hccis_path);
  inputs.mean_daily_registrations = flags.n_rf_ed;
  inputs.reference_facility_id = flags.ref_facility;
  inputs.reference_unit_id = flags.ref_unit;
  inputs.reference_non_ed_rate = flags.ref_non_ed_rate;

  const est::ScenarioOverlay overlay = est::build_scenario_params(inputs);
  util::write_file_atomic(join_path(flags.out_dir, "overlay.json"),
                          est::overlay_to_json(overlay));
  log << fmt::format("wrote {}\n", join_path(flags.out_dir, "overlay.json"));
  for (const std::string& gap : overlay.coverage_gaps) {
    log << fmt::format("coverage gap: {}\n", gap);
  }

  if (!flags.apply_to.empty()) {
    ScenarioConfig cfg = load_scenario(flags.apply_to);
    est::apply_overlay(cfg, overlay);
    const std::string scenario_out = join_path(flags.out_dir, "scenario.json");
    save_scenario(cfg, scenario_out);
    log << fmt::format("wrote {}\n", scenario_out);
  }
  return 0;
}

int cmd_validate(const std::string& scenario_path, std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(scenario_path);
  out << fmt::format(
      "scenario '{}' is valid: {} facilities, {} EDs, {} units, {} LoS samples\n",
      cfg.name, cfg.facilities.size(), cfg.eds().size(), cfg.units().size(),
      cfg.dists.los_samples_hours.size());
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"psychflow: regional psychiatric patient-flow simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  add_common_flags(run_cmd, run_flags, /*wants_policy=*/true);

  CommonFlags compare_flags;
  std::vector<std::string> compare_policies;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Run and statistically compare policies");
  add_common_flags(compare_cmd, compare_flags, /*wants_policy=*/false);
  compare_cmd->add_option("--policy", compare_policies,
                          "Policy to include (repeat; at least two)");

  CommonFlags sweep_flags;
  std::string sweep_axis;
  std::string sweep_grid;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Sensitivity sweep over a multiplier grid");
  sweep_cmd->add_option("axis", sweep_axis, "Sweep axis: rate or los")->required();
  sweep_cmd->add_option("grid", sweep_grid, "Comma-separated multipliers, e.g. 0.5,1.0,1.5")
      ->required();
  add_common_flags(sweep_cmd, sweep_flags, /*wants_policy=*/true);

  EstimateFlags est_flags;
  CLI::App* est_cmd = app.add_subcommand(
      "estimate", "Derive scenario parameters from observed data files");
  est_cmd->add_option("--ed-log", est_flags.ed_log_path,
                      "Reference-ED visit log CSV (timestamp,needs_ip)")
      ->required();
  est_cmd->add_option("--transfer-log", est_flags.transfer_log_path,
                      "Referral log CSV (patient_id,facility_id,t1,t2,decision)")
      ->required();
  est_cmd->add_option("--hccis", est_flags.hccis_path, "Annual capacity survey CSV")
      ->required();
  est_cmd->add_option("--n-rf-ed", est_flags.n_rf_ed,
                      "Mean daily ED registrations at the reference facility")
      ->required()
      ->check(CLI::PositiveNumber);
  est_cmd->add_option("--ref-facility", est_flags.ref_facility,
                      "Reference facility id")
      ->required();
  est_cmd->add_option("--ref-unit", est_flags.ref_unit, "Reference unit id")
      ->required();
  est_cmd->add_option("--ref-non-ed-rate", est_flags.ref_non_ed_rate,
                      "Observed direct admissions/day at the reference unit")
      ->required()
      ->check(CLI::NonNegativeNumber);
  est_cmd->add_option("--out", est_flags.out_dir, "Output directory")->required();
  est_cmd->add_option("--apply-to", est_flags.apply_to,
                      "Scenario JSON to overlay; writes <out>/scenario.json");

  std::string validate_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a scenario file and exit");
  validate_cmd->add_option("--scenario", validate_path, "Scenario JSON file")
      ->required();

  std::vector<const char*> argv;
  argv.push_back("psychflow");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags, out);
    if (compare_cmd->parsed()) return cmd_compare(compare_flags, compare_policies, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_axis, sweep_grid, out);
    if (est_cmd->parsed()) return cmd_estimate(est_flags, out);
    if (validate_cmd->parsed()) return cmd_validate(validate_path, out);
    err << "error: no subcommand given\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const est::EstimatorError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const exp::ExperimentError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace psychflow::cli

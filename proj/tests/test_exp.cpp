// Experiment planning, policy comparison, and sweep table tests. Simulation
// outcomes are hand-crafted so every statistic is checkable by inspection.

#include <doctest.h>
#include <fmt/format.h>

#include <cmath>
#include <string>
#include <vector>

#include "psychflow/exp/experiments.hpp"
#include "psychflow/util/csv.hpp"
#include "helpers.hpp"

using namespace psychflow;
using namespace psychflow::exp;

namespace {

PlacementPolicy make_policy(PolicyKind kind, int fanout = 1) {
  PlacementPolicy p;
  p.kind = kind;
  p.fanout = fanout;
  return p;
}

Variant make_variant(const std::string& label) {
  Variant v;
  v.label = label;
  return v;
}

/// An outcome whose per-replication coordination values are given directly.
VariantOutcome fake_outcome(const std::string& label,
                            const std::vector<double>& coord_all_placed) {
  VariantOutcome o;
  o.variant = make_variant(label);
  for (double v : coord_all_placed) {
    metrics::SummaryReport rep;
    rep.coord_mean_all_placed = v;
    rep.coord_mean_vuln_transferred = v + 1.0;
    rep.delay_mean_all_placed = v + 2.0;
    rep.delay_mean_vuln_transferred = v + 3.0;
    o.summary.per_replication.push_back(rep);
  }
  return o;
}

const MetricComparison& metric_named(const ComparisonReport& report,
                                     const std::string& name) {
  for (const MetricComparison& mc : report.metrics) {
    if (mc.metric == name) return mc;
  }
  FAIL("metric not found: ", name);
  return report.metrics.front();
}

}  // namespace

TEST_CASE("policy labels are stable and directory-safe") {
  CHECK(policy_label(make_policy(PolicyKind::Baseline)) == "baseline");
  CHECK(policy_label(make_policy(PolicyKind::ByAcceptance)) == "by-acceptance");
  CHECK(policy_label(make_policy(PolicyKind::ConcurrentProximity, 3)) ==
        "concurrent-proximity-m3");
  CHECK(policy_label(make_policy(PolicyKind::ConcurrentAcceptance, 2)) ==
        "concurrent-acceptance-m2");
}

TEST_CASE("plan validation rejects malformed variant lists") {
  ExperimentPlan plan;
  plan.base = testing::tiny_scenario();

  SUBCASE("no variants") { CHECK_THROWS_AS(validate_plan(plan), ExperimentError); }

  SUBCASE("empty label") {
    plan.variants.push_back(make_variant(""));
    CHECK_THROWS_AS(validate_plan(plan), ExperimentError);
  }

  SUBCASE("slash in label") {
    plan.variants.push_back(make_variant("a/b"));
    CHECK_THROWS_AS(validate_plan(plan), ExperimentError);
  }

  SUBCASE("duplicate labels") {
    plan.variants.push_back(make_variant("same"));
    plan.variants.push_back(make_variant("same"));
    CHECK_THROWS_AS(validate_plan(plan), ExperimentError);
  }

  SUBCASE("non-positive multiplier") {
    Variant v = make_variant("bad");
    v.rate_multiplier = 0.0;
    plan.variants.push_back(v);
    CHECK_THROWS_AS(validate_plan(plan), ExperimentError);
  }

  SUBCASE("concurrent fanout below one") {
    Variant v = make_variant("bad");
    v.policy = make_policy(PolicyKind::ConcurrentProximity, 0);
    plan.variants.push_back(v);
    CHECK_THROWS_AS(validate_plan(plan), ExperimentError);
  }

  SUBCASE("well-formed plan passes") {
    plan.variants.push_back(make_variant("a"));
    plan.variants.push_back(make_variant("b"));
    CHECK_NOTHROW(validate_plan(plan));
  }
}

TEST_CASE("variant seeds offset by index unless common random numbers") {
  CHECK(variant_seed(100, 0, false) == 100);
  CHECK(variant_seed(100, 1, false) == 101);
  CHECK(variant_seed(100, 4, false) == 104);
  CHECK(variant_seed(100, 0, true) == 100);
  CHECK(variant_seed(100, 4, true) == 100);
}

TEST_CASE("materialize composes multipliers onto the base scenario") {
  ScenarioConfig base = testing::tiny_scenario();
  base.rate_multiplier = 2.0;
  base.los_multiplier = 0.5;

  Variant v = make_variant("x");
  v.policy = make_policy(PolicyKind::ByAcceptance);
  v.rate_multiplier = 1.5;
  v.los_multiplier = 2.0;

  const ScenarioConfig cfg = materialize(base, v);
  CHECK(cfg.policy.kind == PolicyKind::ByAcceptance);
  CHECK(cfg.rate_multiplier == doctest::Approx(3.0));
  CHECK(cfg.los_multiplier == doctest::Approx(1.0));
  CHECK(cfg.seed == base.seed);  // seeding is applied per variant at run time
}

TEST_CASE("sweep variants label each grid point with its multiplier") {
  const ScenarioConfig base = testing::tiny_scenario();

  const auto rate = sweep_variants(base, SweepAxis::Rate, {0.5, 1.0, 1.25});
  REQUIRE(rate.size() == 3);
  CHECK(rate[0].label == "rate-x0.50");
  CHECK(rate[1].label == "rate-x1.00");
  CHECK(rate[2].label == "rate-x1.25");
  CHECK(rate[0].rate_multiplier == doctest::Approx(0.5));
  CHECK(rate[0].los_multiplier == doctest::Approx(1.0));
  CHECK(rate[0].policy == base.policy);

  const auto los = sweep_variants(base, SweepAxis::Los, {2.0});
  REQUIRE(los.size() == 1);
  CHECK(los[0].label == "los-x2.00");
  CHECK(los[0].rate_multiplier == doctest::Approx(1.0));
  CHECK(los[0].los_multiplier == doctest::Approx(2.0));

  CHECK_THROWS_AS(sweep_variants(base, SweepAxis::Rate, {}), ExperimentError);
  CHECK_THROWS_AS(sweep_variants(base, SweepAxis::Rate, {1.0, -0.5}), ExperimentError);
}

TEST_CASE("sweep axis parses its two spellings") {
  CHECK(parse_axis("rate") == SweepAxis::Rate);
  CHECK(parse_axis("los") == SweepAxis::Los);
  CHECK_THROWS_AS(parse_axis("speed"), ExperimentError);
  CHECK(to_string(SweepAxis::Rate) == "rate");
  CHECK(to_string(SweepAxis::Los) == "los");
}

TEST_CASE("comparing outcomes runs rank tests on per-replication values") {
  std::vector<VariantOutcome> outcomes;
  outcomes.push_back(fake_outcome("slow", {10.0, 11.0, 12.0, 13.0}));
  outcomes.push_back(fake_outcome("fast", {1.0, 2.0, 3.0, 4.0}));

  const ComparisonReport report = compare_outcomes(outcomes);
  CHECK(report.labels == std::vector<std::string>{"slow", "fast"});
  REQUIRE(report.metrics.size() == 4);

  const MetricComparison& mc = metric_named(report, "coord_mean_all_placed");
  REQUIRE(mc.samples.size() == 2);
  CHECK(mc.samples[0] == std::vector<double>{10.0, 11.0, 12.0, 13.0});
  CHECK(mc.samples[1] == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(mc.sufficient);
  // Perfectly separated groups: the two-sided exact rank test at n=4 vs 4
  // bottoms out at p = 2/C(8,4) = 2/70.
  REQUIRE(mc.vs_first.size() == 1);
  CHECK(mc.vs_first[0].test.p_value == doctest::Approx(2.0 / 70.0));
  CHECK(mc.kruskal.p_value < 0.05);

  // The derived metrics shift by a constant, so ranks (and p-values) match.
  const MetricComparison& delay = metric_named(report, "delay_mean_all_placed");
  CHECK(delay.vs_first[0].test.p_value == doctest::Approx(mc.vs_first[0].test.p_value));
}

TEST_CASE("comparison drops NaN replications and flags thin data") {
  const double nan = std::nan("");
  std::vector<VariantOutcome> outcomes;
  outcomes.push_back(fake_outcome("a", {5.0, nan, 6.0}));
  outcomes.push_back(fake_outcome("b", {7.0}));

  const ComparisonReport report = compare_outcomes(outcomes);
  const MetricComparison& mc = metric_named(report, "coord_mean_all_placed");
  CHECK(mc.samples[0] == std::vector<double>{5.0, 6.0});  // NaN dropped
  CHECK(mc.samples[1] == std::vector<double>{7.0});       // one usable value
  CHECK_FALSE(mc.sufficient);
  CHECK(mc.kruskal.method == "insufficient-data");
  CHECK(std::isnan(mc.kruskal.p_value));
  CHECK(mc.vs_first.empty());

  CHECK_THROWS_AS(compare_outcomes({outcomes[0]}), ExperimentError);
}

TEST_CASE("comparison stats table lists one omnibus and one pairwise row per metric") {
  std::vector<VariantOutcome> outcomes;
  outcomes.push_back(fake_outcome("base", {10.0, 11.0, 12.0}));
  outcomes.push_back(fake_outcome("new", {1.0, 2.0, 3.0}));
  const ComparisonReport report = compare_outcomes(outcomes);

  const auto table = util::parse_csv(comparison_stats_csv(report), "stats");
  CHECK(table.header == std::vector<std::string>{"metric", "test", "groups",
                                                 "statistic", "p_value", "p_adjusted",
                                                 "method", "n"});
  // 4 metrics x (1 omnibus + 1 pairwise).
  REQUIRE(table.rows.size() == 8);
  CHECK(table.rows[0][0] == "coord_mean_vuln_transferred");
  CHECK(table.rows[0][1] == "kruskal-wallis");
  CHECK(table.rows[0][2] == "base|new");
  CHECK(table.rows[0][7] == "6");
  CHECK(table.rows[1][1] == "mann-whitney-vs-first");
  CHECK(table.rows[1][2] == "base|new");
  CHECK(table.rows[1][7] == "3|3");
}

TEST_CASE("per-replication comparison table holds every summary column") {
  std::vector<VariantOutcome> outcomes;
  outcomes.push_back(fake_outcome("a", {10.0, 20.0}));
  outcomes.push_back(fake_outcome("b", {30.0}));

  const auto table = util::parse_csv(comparison_csv(outcomes), "long");
  REQUIRE(table.header.size() == 2 + metrics::summary_fields().size());
  CHECK(table.header[0] == "variant");
  CHECK(table.header[1] == "replication");
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0][0] == "a");
  CHECK(table.rows[2][0] == "b");
  CHECK(table.rows[2][1] == "0");
}

TEST_CASE("sweep table pairs each plotted metric with its interval half-width") {
  std::vector<VariantOutcome> outcomes;
  for (double mult : {0.5, 1.0}) {
    VariantOutcome o = fake_outcome(fmt::format("rate-x{:.2f}", mult), {1.0, 2.0});
    o.summary.pooled.coord_mean_all_placed = 10.0 * mult;
    o.summary.pooled.occupancy_overall = 0.6 * mult;
    o.summary.ci95_half_width.coord_mean_all_placed = 0.25;
    outcomes.push_back(std::move(o));
  }

  const auto table = util::parse_csv(sweep_csv(SweepAxis::Rate, {0.5, 1.0}, outcomes),
                                     "sweep");
  REQUIRE(table.header.size() == 4 + 2 * 8);
  CHECK(table.header[0] == "axis");
  CHECK(table.header[4] == "coord_mean_all_placed");
  CHECK(table.header[5] == "coord_mean_all_placed_ci95hw");
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][0] == "rate");
  CHECK(table.rows[0][1] == "rate-x0.50");
  CHECK(table.rows[0][2] == "0.5");
  CHECK(table.rows[0][3] == "2");
  CHECK(table.rows[0][4] == "5");     // pooled coordination at the 0.5 point
  CHECK(table.rows[0][5] == "0.25");  // its half-width
  CHECK(table.rows[1][4] == "10");
}

TEST_CASE("running a plan produces one outcome per variant with aligned seeds") {
  ScenarioConfig base = testing::tiny_scenario();
  base.replications = 2;
  base.horizon_days = 12;
  base.warmup_days = 2;

  ExperimentPlan plan;
  plan.base = base;
  Variant a = make_variant("baseline");
  Variant b = make_variant("by-acceptance");
  b.policy = make_policy(PolicyKind::ByAcceptance);
  plan.variants = {a, b};

  SUBCASE("independent seeding differs across variants") {
    const auto outcomes = run_plan(plan);
    REQUIRE(outcomes.size() == 2);
    REQUIRE(outcomes[0].replications.size() == 2);
    REQUIRE(outcomes[1].replications.size() == 2);
    CHECK(outcomes[0].summary.per_replication.size() == 2);
    // Variant 0 runs exactly as a plain run with the base seed would.
    flow::RunOptions opts;
    opts.seed = base.seed;
    const auto direct = flow::run_replication(base, 0, opts);
    CHECK(outcomes[0].replications[0].trace_hash == direct.trace_hash);
    // Variant 1 uses base seed + 1, so its demand stream differs.
    CHECK(outcomes[1].replications[0].trace_hash != direct.trace_hash);
  }

  SUBCASE("common random numbers reuse the base seed everywhere") {
    plan.crn = true;
    plan.variants[1].policy = plan.variants[0].policy;  // same policy twice
    plan.variants[1].label = "baseline-again";
    const auto outcomes = run_plan(plan);
    // Identical policy + identical seed = bit-identical simulations.
    CHECK(outcomes[0].replications[0].trace_hash ==
          outcomes[1].replications[0].trace_hash);
    CHECK(outcomes[0].replications[1].trace_hash ==
          outcomes[1].replications[1].trace_hash);
  }
}

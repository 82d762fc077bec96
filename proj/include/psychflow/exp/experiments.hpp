#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psychflow/errors.hpp"
#include "psychflow/flow/simulation.hpp"
#include "psychflow/metrics/summary.hpp"
#include "psychflow/stats/tests.hpp"

namespace psychflow::exp {

struct ExperimentError : Error {
  using Error::Error;
};

/// One configuration under test: the base scenario with a policy and demand/
/// stay multipliers composed onto it.
struct Variant {
  std::string label;
  PlacementPolicy policy;
  double rate_multiplier = 1.0;  ///< multiplies the base scenario's value
  double los_multiplier = 1.0;   ///< multiplies the base scenario's value
};

/// Stable directory-safe label for a policy ("concurrent-proximity-m2").
std::string policy_label(const PlacementPolicy& policy);

struct ExperimentPlan {
  ScenarioConfig base;
  std::vector<Variant> variants;
  /// Common random numbers: every variant reuses the base seed so demand
  /// streams align across variants. Off = independent seeds per variant.
  bool crn = false;
};

/// Unique non-empty labels, positive multipliers, at least one variant.
void validate_plan(const ExperimentPlan& plan);  // throws ExperimentError

/// Seed for variant `index`: base + index, or just base under CRN.
std::uint64_t variant_seed(std::uint64_t base_seed, std::size_t index, bool crn);

/// The base scenario with one variant's overrides applied.
ScenarioConfig materialize(const ScenarioConfig& base, const Variant& v);

struct VariantOutcome {
  Variant variant;
  std::vector<flow::ReplicationResult> replications;
  metrics::SummaryTable summary;
};

using Progress = std::function<void(const std::string&)>;

VariantOutcome run_variant(const ExperimentPlan& plan, std::size_t index,
                           const Progress& progress = {});
std::vector<VariantOutcome> run_plan(const ExperimentPlan& plan,
                                     const Progress& progress = {});

// ---------------------------------------------------------------------------
// Policy comparison
// ---------------------------------------------------------------------------

/// Rank tests across variants for one summary field, computed over the
/// per-replication values (replications whose cohort was empty drop out).
struct MetricComparison {
  std::string metric;
  std::vector<std::vector<double>> samples;  ///< per variant
  stats::TestResult kruskal;
  std::vector<stats::PairwiseComparison> vs_first;  ///< each variant vs variants[0]
  bool sufficient = false;  ///< every variant contributed >= 2 replications
};

struct ComparisonReport {
  std::vector<std::string> labels;
  std::vector<MetricComparison> metrics;
};

/// Compares the default outcome metrics: coordination time and treatment
/// delay for transferred vulnerable patients (the headline cohort) and for
/// all placed ED patients.
ComparisonReport compare_outcomes(const std::vector<VariantOutcome>& outcomes);

/// Long-format per-replication table: variant, replication, every summary
/// field (pick any cohort column downstream).
std::string comparison_csv(const std::vector<VariantOutcome>& outcomes);

/// Test results: one Kruskal-Wallis row per metric plus one Mann-Whitney
/// vs-first row per (metric, variant).
std::string comparison_stats_csv(const ComparisonReport& report);

std::string comparison_text(const ComparisonReport& report,
                            const std::vector<VariantOutcome>& outcomes);

// ---------------------------------------------------------------------------
// Sensitivity sweeps
// ---------------------------------------------------------------------------

enum class SweepAxis { Rate, Los };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& text);  // throws ExperimentError

/// Variant list for a multiplier grid, labeled like "rate-x0.50".
std::vector<Variant> sweep_variants(const ScenarioConfig& base, SweepAxis axis,
                                    const std::vector<double>& grid);

/// One row per grid point: multiplier plus the plot-ready pooled outcomes
/// (coordination, delay, distance, occupancy) with interval half-widths.
std::string sweep_csv(SweepAxis axis, const std::vector<double>& grid,
                      const std::vector<VariantOutcome>& outcomes);

std::string sweep_text(SweepAxis axis, const std::vector<double>& grid,
                       const std::vector<VariantOutcome>& outcomes);

}  // namespace psychflow::exp

#include "psychflow/exp/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "psychflow/util/csv.hpp"

namespace psychflow::exp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isnan(v) ? "" : fmt::format("{}", v); }

struct NamedField {
  const char* name;
  double metrics::SummaryReport::* field;
};

/// Fields the comparison tests run on: the headline cohort (transferred
/// vulnerable patients) plus the widest cohort as a high-power backstop.
constexpr NamedField kComparisonMetrics[] = {
    {"coord_mean_vuln_transferred", &metrics::SummaryReport::coord_mean_vuln_transferred},
    {"delay_mean_vuln_transferred", &metrics::SummaryReport::delay_mean_vuln_transferred},
    {"coord_mean_all_placed", &metrics::SummaryReport::coord_mean_all_placed},
    {"delay_mean_all_placed", &metrics::SummaryReport::delay_mean_all_placed},
};

/// Fields worth plotting against a sweep axis.
constexpr NamedField kSweepMetrics[] = {
    {"coord_mean_all_placed", &metrics::SummaryReport::coord_mean_all_placed},
    {"coord_mean_vuln_transferred", &metrics::SummaryReport::coord_mean_vuln_transferred},
    {"delay_mean_all_placed", &metrics::SummaryReport::delay_mean_all_placed},
    {"distance_mean_placed", &metrics::SummaryReport::distance_mean_placed},
    {"distance_mean_transferred", &metrics::SummaryReport::distance_mean_transferred},
    {"pct_transferred_all", &metrics::SummaryReport::pct_transferred_all},
    {"occupancy_overall", &metrics::SummaryReport::occupancy_overall},
    {"censored_pct", &metrics::SummaryReport::censored_pct},
};

}  // namespace

std::string policy_label(const PlacementPolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::Baseline:
      return "baseline";
    case PolicyKind::ByAcceptance:
      return "by-acceptance";
    case PolicyKind::ConcurrentProximity:
      return fmt::format("concurrent-proximity-m{}", policy.fanout);
    case PolicyKind::ConcurrentAcceptance:
    default:
      return fmt::format("concurrent-acceptance-m{}", policy.fanout);
  }
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.variants.empty()) throw ExperimentError("experiment plan has no variants");
  std::set<std::string> seen;
  for (const Variant& v : plan.variants) {
    if (v.label.empty()) throw ExperimentError("variant label cannot be empty");
    if (v.label.find('/') != std::string::npos) {
      throw ExperimentError(fmt::format("variant label '{}' cannot contain '/'", v.label));
    }
    if (!seen.insert(v.label).second) {
      throw ExperimentError(fmt::format("duplicate variant label '{}'", v.label));
    }
    if (!(v.rate_multiplier > 0.0) || !(v.los_multiplier > 0.0)) {
      throw ExperimentError(
          fmt::format("variant '{}' needs positive multipliers", v.label));
    }
    if (v.policy.concurrent() && v.policy.fanout < 1) {
      throw ExperimentError(
          fmt::format("variant '{}' needs fanout >= 1", v.label));
    }
  }
}

std::uint64_t variant_seed(std::uint64_t base_seed, std::size_t index, bool crn) {
  return crn ? base_seed : base_seed + static_cast<std::uint64_t>(index);
}

ScenarioConfig materialize(const ScenarioConfig& base, const Variant& v) {
  ScenarioConfig cfg = base;
  cfg.policy = v.policy;
  cfg.rate_multiplier *= v.rate_multiplier;
  cfg.los_multiplier *= v.los_multiplier;
  return cfg;
}

VariantOutcome run_variant(const ExperimentPlan& plan, std::size_t index,
                           const Progress& progress) {
  const Variant& v = plan.variants.at(index);
  const ScenarioConfig scenario = materialize(plan.base, v);
  const Facility* ref = scenario.reference_facility();
  const std::string ref_id = ref != nullptr ? ref->facility_id : std::string{};

  flow::RunOptions opts;
  opts.seed = variant_seed(plan.base.seed, index, plan.crn);

  VariantOutcome out;
  out.variant = v;
  for (int rep = 0; rep < scenario.replications; ++rep) {
    out.replications.push_back(flow::run_replication(scenario, rep, opts));
    if (progress) {
      const auto& r = out.replications.back();
      progress(fmt::format("{}: replication {}/{} ({} patients, {} events)", v.label,
                           rep + 1, scenario.replications, r.patients_total,
                           r.events_fired));
    }
  }
  out.summary = metrics::build_summary_table(out.replications, ref_id);
  return out;
}

std::vector<VariantOutcome> run_plan(const ExperimentPlan& plan,
                                     const Progress& progress) {
  validate_plan(plan);
  std::vector<VariantOutcome> outcomes;
  for (std::size_t i = 0; i < plan.variants.size(); ++i) {
    outcomes.push_back(run_variant(plan, i, progress));
  }
  return outcomes;
}

ComparisonReport compare_outcomes(const std::vector<VariantOutcome>& outcomes) {
  if (outcomes.size() < 2) {
    throw ExperimentError("comparison needs at least two variants");
  }
  ComparisonReport report;
  for (const VariantOutcome& o : outcomes) report.labels.push_back(o.variant.label);

  for (const NamedField& metric : kComparisonMetrics) {
    MetricComparison mc;
    mc.metric = metric.name;
    for (const VariantOutcome& o : outcomes) {
      std::vector<double> vals;
      for (const metrics::SummaryReport& row : o.summary.per_replication) {
        const double v = row.*metric.field;
        if (!std::isnan(v)) vals.push_back(v);
      }
      mc.samples.push_back(std::move(vals));
    }
    mc.sufficient = std::all_of(mc.samples.begin(), mc.samples.end(),
                                [](const auto& s) { return s.size() >= 2; });
    if (mc.sufficient) {
      mc.kruskal = stats::kruskal_wallis(mc.samples);
      mc.vs_first = stats::mann_whitney_vs_first(mc.samples);
    } else {
      mc.kruskal.method = "insufficient-data";
      mc.kruskal.statistic = kNan;
      mc.kruskal.p_value = kNan;
    }
    report.metrics.push_back(std::move(mc));
  }
  return report;
}

std::string comparison_csv(const std::vector<VariantOutcome>& outcomes) {
  std::string out;
  std::vector<std::string> header{"variant", "replication"};
  for (const metrics::SummaryField& f : metrics::summary_fields()) {
    header.emplace_back(f.name);
  }
  out += util::csv_line(header);
  out += '\n';
  for (const VariantOutcome& o : outcomes) {
    for (std::size_t rep = 0; rep < o.summary.per_replication.size(); ++rep) {
      std::vector<std::string> row{o.variant.label, fmt::format("{}", rep)};
      for (const metrics::SummaryField& f : metrics::summary_fields()) {
        row.push_back(cell(o.summary.per_replication[rep].*f.field));
      }
      out += util::csv_line(row);
      out += '\n';
    }
  }
  return out;
}

std::string comparison_stats_csv(const ComparisonReport& report) {
  std::string out;
  out += util::csv_line({"metric", "test", "groups", "statistic", "p_value",
                         "p_adjusted", "method", "n"});
  out += '\n';
  for (const MetricComparison& mc : report.metrics) {
    std::string all_groups;
    std::size_t total_n = 0;
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
      if (i) all_groups += '|';
      all_groups += report.labels[i];
      if (i < mc.samples.size()) total_n += mc.samples[i].size();
    }
    out += util::csv_line({mc.metric, "kruskal-wallis", all_groups,
                           cell(mc.kruskal.statistic), cell(mc.kruskal.p_value), "",
                           mc.kruskal.method, fmt::format("{}", total_n)});
    out += '\n';
    for (const stats::PairwiseComparison& pc : mc.vs_first) {
      out += util::csv_line(
          {mc.metric, "mann-whitney-vs-first",
           report.labels[pc.first] + "|" + report.labels[pc.second],
           cell(pc.test.statistic), cell(pc.test.p_value), cell(pc.p_adjusted),
           pc.test.method,
           fmt::format("{}|{}", mc.samples[pc.first].size(),
                       mc.samples[pc.second].size())});
      out += '\n';
    }
  }
  return out;
}

std::string comparison_text(const ComparisonReport& report,
                            const std::vector<VariantOutcome>& outcomes) {
  std::string out = "policy comparison\n=================\n";
  for (const MetricComparison& mc : report.metrics) {
    out += fmt::format("\n{}\n", mc.metric);
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
      const auto& sample = mc.samples[i];
      if (sample.empty()) {
        out += fmt::format("  {:<28} (no data)\n", report.labels[i]);
        continue;
      }
      out += fmt::format("  {:<28} n={:<3} mean={:<10.3f} median={:<10.3f}\n",
                         report.labels[i], sample.size(), stats::mean_of(sample),
                         stats::median_of(sample));
    }
    if (!mc.sufficient) {
      out += "  too few usable replications for rank tests\n";
      continue;
    }
    out += fmt::format("  Kruskal-Wallis: H={:.4f} p={:.6f}\n", mc.kruskal.statistic,
                       mc.kruskal.p_value);
    for (const stats::PairwiseComparison& pc : mc.vs_first) {
      out += fmt::format("  vs {}: {:<28} U={:<8.1f} p={:.6f} adj={:.6f}\n",
                         report.labels[pc.first], report.labels[pc.second],
                         pc.test.statistic, pc.test.p_value, pc.p_adjusted);
    }
  }
  (void)outcomes;
  return out;
}

std::string to_string(SweepAxis axis) {
  return axis == SweepAxis::Rate ? "rate" : "los";
}

SweepAxis parse_axis(const std::string& text) {
  if (text == "rate") return SweepAxis::Rate;
  if (text == "los") return SweepAxis::Los;
  throw ExperimentError(
      fmt::format("unknown sweep axis '{}' (expected 'rate' or 'los')", text));
}

std::vector<Variant> sweep_variants(const ScenarioConfig& base, SweepAxis axis,
                                    const std::vector<double>& grid) {
  if (grid.empty()) throw ExperimentError("sweep grid cannot be empty");
  std::vector<Variant> variants;
  for (double g : grid) {
    if (!(g > 0.0)) {
      throw ExperimentError(fmt::format("sweep multiplier {} must be positive", g));
    }
    Variant v;
    v.label = fmt::format("{}-x{:.2f}", to_string(axis), g);
    v.policy = base.policy;
    (axis == SweepAxis::Rate ? v.rate_multiplier : v.los_multiplier) = g;
    variants.push_back(std::move(v));
  }
  return variants;
}

std::string sweep_csv(SweepAxis axis, const std::vector<double>& grid,
                      const std::vector<VariantOutcome>& outcomes) {
  std::string out;
  std::vector<std::string> header{"axis", "label", "multiplier", "replications"};
  for (const NamedField& m : kSweepMetrics) {
    header.emplace_back(m.name);
    header.emplace_back(std::string(m.name) + "_ci95hw");
  }
  out += util::csv_line(header);
  out += '\n';
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const VariantOutcome& o = outcomes[i];
    std::vector<std::string> row{to_string(axis), o.variant.label,
                                 fmt::format("{}", grid.at(i)),
                                 fmt::format("{}", o.summary.per_replication.size())};
    for (const NamedField& m : kSweepMetrics) {
      row.push_back(cell(o.summary.pooled.*m.field));
      row.push_back(cell(o.summary.ci95_half_width.*m.field));
    }
    out += util::csv_line(row);
    out += '\n';
  }
  return out;
}

std::string sweep_text(SweepAxis axis, const std::vector<double>& grid,
                       const std::vector<VariantOutcome>& outcomes) {
  std::string out = fmt::format("{} sweep\n==========\n", to_string(axis));
  out += fmt::format("  {:<12} {:>14} {:>14} {:>14} {:>12}\n", "multiplier",
                     "coordination", "delay", "distance", "occupancy");
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const metrics::SummaryReport& p = outcomes[i].summary.pooled;
    out += fmt::format("  {:<12.2f} {:>14.3f} {:>14.3f} {:>14.3f} {:>12.3f}\n",
                       grid.at(i), p.coord_mean_all_placed, p.delay_mean_all_placed,
                       p.distance_mean_placed, p.occupancy_overall);
  }
  out += "  (hours / hours / miles / fraction; full detail in sweep.csv)\n";
  return out;
}

}  // namespace psychflow::exp

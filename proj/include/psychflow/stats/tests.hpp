#pragma once

#include <span>
#include <string>
#include <vector>

namespace psychflow::stats {

/// Outcome of one hypothesis test (two-sided unless stated otherwise).
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string method;                  ///< e.g. "mann-whitney-exact"
  std::vector<std::size_t> sample_sizes;
};

/// Welch's unequal-variance t test plus a 95% CI for mean(x) - mean(y).
struct WelchResult {
  TestResult test;
  double mean_diff = 0.0;
  double df = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Requires n >= 2 on both sides. When both variances are zero the test
/// degenerates: p = 1 if the means are equal, else p = 0.
WelchResult welch_t_test(std::span<const double> x, std::span<const double> y);

enum class MwMethod {
  Auto,        ///< exact when both n <= 12 and tie-free, else asymptotic
  Exact,       ///< full null distribution (requires tie-free data)
  Asymptotic,  ///< normal approximation, tie-corrected, continuity-corrected
};

/// Mann-Whitney U (two-sided). The statistic reported is U for the first
/// sample: R1 - n1(n1+1)/2 with midranks for ties.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          MwMethod method = MwMethod::Auto);

/// Kruskal-Wallis H across k >= 2 groups, tie-corrected, with a chi-squared
/// (k-1 df) p-value. All-identical data gives H = 0, p = 1.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Bonferroni adjustment: min(1, p * comparisons).
double bonferroni_adjust(double p, std::size_t comparisons);

/// One pairwise comparison inside a family of tests.
struct PairwiseComparison {
  std::size_t first = 0;
  std::size_t second = 0;
  TestResult test;
  double p_adjusted = 1.0;
};

/// Mann-Whitney over every pair of groups, Bonferroni-adjusted by the
/// number of pairs k(k-1)/2.
std::vector<PairwiseComparison> pairwise_mann_whitney(
    const std::vector<std::vector<double>>& groups);

/// Mann-Whitney of each later group against groups[0] (the control),
/// Bonferroni-adjusted by k-1.
std::vector<PairwiseComparison> mann_whitney_vs_first(
    const std::vector<std::vector<double>>& groups);

/// Midranks (average ranks for ties) of `values`, 1-based.
std::vector<double> midranks(std::span<const double> values);

// Small numeric helpers shared with the metrics layer.
double mean_of(std::span<const double> values);
double sample_sd(std::span<const double> values);  ///< n-1 denominator
double median_of(std::vector<double> values);      ///< midpoint rule for even n

/// Half-width of a t-based 95% confidence interval for the mean of
/// `values`; 0 when fewer than two values.
double ci95_half_width(std::span<const double> values);

}  // namespace psychflow::stats

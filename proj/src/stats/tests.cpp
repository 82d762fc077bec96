#include "psychflow/stats/tests.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "psychflow/stats/distributions.hpp"

namespace psychflow::stats {

double mean_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("sample sd needs n >= 2");
  double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double ci95_half_width(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double se = sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
  if (se == 0.0) return 0.0;
  return student_t_quantile(0.975, static_cast<double>(values.size() - 1)) * se;
}

WelchResult welch_t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) throw std::invalid_argument("welch_t_test needs n >= 2");
  double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
  double m1 = mean_of(x), m2 = mean_of(y);
  double v1 = sample_sd(x), v2 = sample_sd(y);
  v1 *= v1;
  v2 *= v2;
  WelchResult r;
  r.mean_diff = m1 - m2;
  r.test.method = "welch-t";
  r.test.sample_sizes = {x.size(), y.size()};
  double se2 = v1 / n1 + v2 / n2;
  if (se2 == 0.0) {
    // Degenerate: no variability at all.
    r.df = n1 + n2 - 2.0;
    r.test.statistic = 0.0;
    r.test.p_value = r.mean_diff == 0.0 ? 1.0 : 0.0;
    r.ci_low = r.ci_high = r.mean_diff;
    return r;
  }
  double se = std::sqrt(se2);
  r.test.statistic = r.mean_diff / se;
  r.df = se2 * se2 /
         (v1 * v1 / (n1 * n1 * (n1 - 1.0)) + v2 * v2 / (n2 * n2 * (n2 - 1.0)));
  r.test.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(r.test.statistic), r.df));
  double tq = student_t_quantile(0.975, r.df);
  r.ci_low = r.mean_diff - tq * se;
  r.ci_high = r.mean_diff + tq * se;
  return r;
}

std::vector<double> midranks(std::span<const double> values) {
  std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

bool has_ties(std::span<const double> x, std::span<const double> y) {
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Null distribution of U: count(m, n, u) = number of x/y arrangements of m
// x-values among m+n with U exactly u. Peeling off the largest pooled value:
// it is an x (beats all n y's, so U loses n) or a y.
double exact_mw_p(std::size_t n1, std::size_t n2, double u_obs) {
  std::size_t umax = n1 * n2;
  std::vector<std::vector<double>> table((n1 + 1) * (n2 + 1));
  auto at = [&](std::size_t m, std::size_t n) -> std::vector<double>& {
    return table[m * (n2 + 1) + n];
  };
  for (std::size_t n = 0; n <= n2; ++n) at(0, n) = {1.0};
  for (std::size_t m = 1; m <= n1; ++m) {
    at(m, 0) = {1.0};
    for (std::size_t n = 1; n <= n2; ++n) {
      const auto& take_x = at(m - 1, n);  // shifted up by n
      const auto& take_y = at(m, n - 1);
      std::vector<double> cur(m * n + 1, 0.0);
      for (std::size_t u = 0; u < take_x.size(); ++u) cur[u + n] += take_x[u];
      for (std::size_t u = 0; u < take_y.size(); ++u) cur[u] += take_y[u];
      at(m, n) = std::move(cur);
    }
  }
  const auto& dist = at(n1, n2);
  double total = 0.0;
  for (double c : dist) total += c;
  double le = 0.0, ge = 0.0;
  for (std::size_t u = 0; u <= umax; ++u) {
    if (static_cast<double>(u) <= u_obs + 1e-9) le += dist[u];
    if (static_cast<double>(u) >= u_obs - 1e-9) ge += dist[u];
  }
  return std::min(1.0, 2.0 * std::min(le / total, ge / total));
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, MwMethod method) {
  if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney_u needs n >= 1");
  double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());

  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<double> ranks = midranks(pooled);
  double r1 = std::accumulate(ranks.begin(), ranks.begin() + x.size(), 0.0);
  double u = r1 - n1 * (n1 + 1.0) / 2.0;

  bool tied = has_ties(x, y);
  bool want_exact;
  switch (method) {
    case MwMethod::Exact:
      if (tied) throw std::invalid_argument("exact Mann-Whitney requires tie-free data");
      want_exact = true;
      break;
    case MwMethod::Asymptotic:
      want_exact = false;
      break;
    case MwMethod::Auto:
    default:
      want_exact = !tied && x.size() <= 12 && y.size() <= 12;
      break;
  }

  TestResult r;
  r.statistic = u;
  r.sample_sizes = {x.size(), y.size()};
  if (want_exact) {
    r.method = "mann-whitney-exact";
    r.p_value = exact_mw_p(x.size(), y.size(), u);
    return r;
  }

  r.method = "mann-whitney-asymptotic";
  double n = n1 + n2;
  // Tie correction to the null variance.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  double mu = n1 * n2 / 2.0;
  double sigma2 = n1 * n2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (sigma2 <= 0.0) {
    r.p_value = 1.0;  // every pooled value identical
    return r;
  }
  double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(sigma2);
  r.p_value = std::erfc(z / std::sqrt(2.0));
  return r;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis needs >= 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("kruskal_wallis needs non-empty groups");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  double n = static_cast<double>(pooled.size());
  std::vector<double> ranks = midranks(pooled);

  TestResult r;
  r.method = "kruskal-wallis";
  for (const auto& g : groups) r.sample_sizes.push_back(g.size());

  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rsum = std::accumulate(ranks.begin() + static_cast<std::ptrdiff_t>(offset),
                                  ranks.begin() + static_cast<std::ptrdiff_t>(offset + g.size()),
                                  0.0);
    h += rsum * rsum / static_cast<double>(g.size());
    offset += g.size();
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  double correction = 1.0 - tie_sum / (n * n * n - n);
  if (correction <= 0.0) {
    // All pooled observations identical: no evidence of any difference.
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  h /= correction;
  r.statistic = h;
  r.p_value = 1.0 - chi2_cdf(h, static_cast<double>(groups.size() - 1));
  return r;
}

double bonferroni_adjust(double p, std::size_t comparisons) {
  return std::min(1.0, p * static_cast<double>(comparisons));
}

std::vector<PairwiseComparison> pairwise_mann_whitney(
    const std::vector<std::vector<double>>& groups) {
  std::vector<PairwiseComparison> out;
  std::size_t k = groups.size();
  std::size_t m = k * (k - 1) / 2;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      PairwiseComparison c;
      c.first = i;
      c.second = j;
      c.test = mann_whitney_u(groups[i], groups[j]);
      c.p_adjusted = bonferroni_adjust(c.test.p_value, m);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<PairwiseComparison> mann_whitney_vs_first(
    const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("need a control plus >= 1 group");
  std::vector<PairwiseComparison> out;
  std::size_t m = groups.size() - 1;
  for (std::size_t j = 1; j < groups.size(); ++j) {
    PairwiseComparison c;
    c.first = 0;
    c.second = j;
    c.test = mann_whitney_u(groups[0], groups[j]);
    c.p_adjusted = bonferroni_adjust(c.test.p_value, m);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace psychflow::stats

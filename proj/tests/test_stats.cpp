#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "psychflow/sim/random.hpp"
#include "psychflow/stats/distributions.hpp"
#include "psychflow/stats/tests.hpp"

using namespace psychflow::stats;

// Reference values in this file were computed independently with
// high-precision implementations of the same definitions and are frozen
// to 10 decimal places.

TEST_CASE("special functions match frozen reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(2.0 * (1.0 - normal_cdf(1.96)) == doctest::Approx(0.049995790296).epsilon(1e-9));

  CHECK(chi2_cdf(3.5, 2) == doctest::Approx(0.826226056550).epsilon(1e-10));
  CHECK(chi2_cdf(10.0, 4) == doctest::Approx(0.959572318005).epsilon(1e-10));
  CHECK(chi2_cdf(0.5, 1) == doctest::Approx(0.520499877813).epsilon(1e-10));

  CHECK(student_t_cdf(2.0, 5) == doctest::Approx(0.949030260585).epsilon(1e-10));
  CHECK(student_t_cdf(-1.3, 19) == doctest::Approx(0.104575750149).epsilon(1e-10));

  CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.7062047364).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 5) == doctest::Approx(2.5705818356).epsilon(1e-9));
  CHECK(student_t_quantile(0.975, 19) == doctest::Approx(2.0930240544).epsilon(1e-9));
  CHECK(student_t_quantile(0.025, 5) == doctest::Approx(-2.5705818356).epsilon(1e-9));

  // CDF/quantile are inverses.
  for (double p : {0.1, 0.5, 0.9, 0.975}) {
    CHECK(student_t_cdf(student_t_quantile(p, 7), 7) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("welch t test matches frozen reference") {
  std::vector<double> x = {2.1, 3.4, 2.9, 3.8, 3.1, 2.5};
  std::vector<double> y = {3.9, 4.4, 4.1, 5.0, 4.6, 4.8};
  auto r = welch_t_test(x, y);
  CHECK(r.test.statistic == doctest::Approx(-4.9573423039).epsilon(1e-9));
  CHECK(r.df == doctest::Approx(8.8296123676).epsilon(1e-9));
  CHECK(r.test.p_value == doctest::Approx(0.0008291727).epsilon(1e-6));
  CHECK(r.mean_diff == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(r.ci_low == doctest::Approx(-2.1865056585).epsilon(1e-8));
  CHECK(r.ci_high == doctest::Approx(-0.8134943415).epsilon(1e-8));
  // Significance and the CI excluding zero must agree.
  CHECK((r.test.p_value < 0.05) == (r.ci_low > 0.0 || r.ci_high < 0.0));

  std::vector<double> flat = {2.0, 2.0, 2.0};
  CHECK(welch_t_test(flat, flat).test.p_value == 1.0);
  std::vector<double> flat2 = {3.0, 3.0};
  CHECK(welch_t_test(flat, flat2).test.p_value == 0.0);
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1.0}, flat), std::invalid_argument);
}

TEST_CASE("mann-whitney exact values match frozen references") {
  auto p = [](std::vector<double> a, std::vector<double> b) {
    return mann_whitney_u(a, b, MwMethod::Exact);
  };
  auto r1 = p({1, 2}, {3, 4});
  CHECK(r1.statistic == 0.0);
  CHECK(r1.p_value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  auto r2 = p({3, 1}, {2, 4});
  CHECK(r2.p_value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  auto r3 = p({1.5, 2.5, 3.5}, {2, 3, 4, 5});
  CHECK(r3.statistic == 3.0);
  CHECK(r3.p_value == doctest::Approx(0.4).epsilon(1e-12));

  auto r4 = p({12, 15, 18, 21, 24, 27}, {13, 16, 19, 22, 25, 28});
  CHECK(r4.statistic == 15.0);
  CHECK(r4.p_value == doctest::Approx(0.6991341991).epsilon(1e-9));
  CHECK(r4.method == "mann-whitney-exact");
}

TEST_CASE("exact p equals brute-force enumeration for every small dataset") {
  // All tie-free datasets up to 8 total observations, realised as distinct
  // values; every split of the pooled order into x/y positions is a dataset.
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = 10.0 * static_cast<double>(i + 1);
    for (std::size_t n1 = 1; n1 < n; ++n1) {
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask & (1u << i)) x.push_back(values[i]);
          else y.push_back(values[i]);
        }
        auto got = mann_whitney_u(x, y, MwMethod::Exact);

        // Brute force: U of every arrangement of the same pooled values.
        auto u_of = [&](std::uint32_t m) {
          double u = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            if (!(m & (1u << i))) continue;
            for (std::size_t j = 0; j < n; ++j) {
              if (!(m & (1u << j)) && values[j] < values[i]) u += 1.0;
            }
          }
          return u;
        };
        double u_obs = u_of(mask);
        double le = 0, ge = 0, total = 0;
        for (std::uint32_t m = 0; m < (1u << n); ++m) {
          if (static_cast<std::size_t>(__builtin_popcount(m)) != n1) continue;
          total += 1.0;
          double u = u_of(m);
          if (u <= u_obs) le += 1.0;
          if (u >= u_obs) ge += 1.0;
        }
        double expect = std::min(1.0, 2.0 * std::min(le / total, ge / total));
        REQUIRE(got.statistic == doctest::Approx(u_obs).epsilon(1e-12));
        REQUIRE(got.p_value == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mann-whitney asymptotic handles ties and matches frozen references") {
  std::vector<double> x = {1, 2, 2, 3}, y = {2, 3, 4, 4};
  auto r = mann_whitney_u(x, y);  // ties force the asymptotic path
  CHECK(r.method == "mann-whitney-asymptotic");
  CHECK(r.statistic == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.1341691801).epsilon(1e-9));

  std::vector<double> a = {12, 15, 18, 21, 24, 27}, b = {13, 16, 19, 22, 25, 28};
  auto asym = mann_whitney_u(a, b, MwMethod::Asymptotic);
  CHECK(asym.p_value == doctest::Approx(0.6889205558).epsilon(1e-9));
  // The approximation should sit close to the exact answer at this size.
  auto exact = mann_whitney_u(a, b, MwMethod::Exact);
  CHECK(std::abs(asym.p_value - exact.p_value) < 0.02);

  CHECK_THROWS_AS(mann_whitney_u(x, y, MwMethod::Exact), std::invalid_argument);

  std::vector<double> same = {5, 5, 5}, same2 = {5, 5};
  CHECK(mann_whitney_u(same, same2).p_value == 1.0);
}

TEST_CASE("kruskal-wallis matches frozen references") {
  std::vector<std::vector<double>> groups = {
      {1.2, 2.3, 3.1}, {2.2, 3.3, 4.1, 5.0}, {4.2, 5.3, 6.1}};
  auto r = kruskal_wallis(groups);
  CHECK(r.statistic == doctest::Approx(5.9363636364).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(0.0513966739).epsilon(1e-8));

  std::vector<std::vector<double>> tied = {{1, 2, 2, 3}, {2, 3, 3, 4}, {3, 4, 4, 5}};
  auto rt = kruskal_wallis(tied);
  CHECK(rt.statistic == doctest::Approx(6.4132462687).epsilon(1e-9));
  CHECK(rt.p_value == doctest::Approx(0.0404931225).epsilon(1e-8));

  std::vector<std::vector<double>> flat = {{7, 7}, {7, 7, 7}, {7}};
  auto rf = kruskal_wallis(flat);
  CHECK(rf.statistic == 0.0);
  CHECK(rf.p_value == 1.0);

  CHECK_THROWS_AS(kruskal_wallis({{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("bonferroni families use the right comparison counts") {
  CHECK(bonferroni_adjust(0.01, 5) == doctest::Approx(0.05));
  CHECK(bonferroni_adjust(0.5, 4) == 1.0);

  std::vector<std::vector<double>> groups = {
      {1, 2, 3, 4}, {2, 3, 4, 5}, {5, 6, 7, 8}, {6, 7, 8, 9}};
  auto all_pairs = pairwise_mann_whitney(groups);
  CHECK(all_pairs.size() == 6);
  for (const auto& c : all_pairs) {
    CHECK(c.p_adjusted == doctest::Approx(std::min(1.0, c.test.p_value * 6.0)));
  }
  auto vs_first = mann_whitney_vs_first(groups);
  CHECK(vs_first.size() == 3);
  for (const auto& c : vs_first) {
    CHECK(c.first == 0);
    CHECK(c.p_adjusted == doctest::Approx(std::min(1.0, c.test.p_value * 3.0)));
  }
}

TEST_CASE("mann-whitney rejects at close to nominal rate under the null") {
  psychflow::sim::RngStream rng(2024, 0, psychflow::sim::StreamPurpose::Attributes);
  int rejections = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(20), y(20);
    for (auto& v : x) v = rng.exponential(5.0);
    for (auto& v : y) v = rng.exponential(5.0);
    if (mann_whitney_u(x, y).p_value < 0.05) ++rejections;
  }
  double rate = rejections / static_cast<double>(trials);
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.07);
}

TEST_CASE("descriptive helpers: mean, sd, median, ci") {
  std::vector<double> v = {1.0, 2.0, 3.0, 10.0};
  CHECK(mean_of(v) == doctest::Approx(4.0));
  CHECK(median_of(v) == doctest::Approx(2.5));
  CHECK(median_of({5.0, 1.0, 9.0}) == doctest::Approx(5.0));
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt((9.0 + 4.0 + 1.0 + 36.0) / 3.0)));
  // n=20 of the same value: zero half-width; two values: t-quantile based.
  CHECK(ci95_half_width(std::vector<double>(20, 3.3)) == doctest::Approx(0.0));
  std::vector<double> two = {1.0, 3.0};
  // hw = t(.975, 1) * sd/sqrt(2) = 12.7062047364 * sqrt(2)/sqrt(2)... sd = sqrt(2)
  CHECK(ci95_half_width(two) ==
        doctest::Approx(12.7062047364 * std::sqrt(2.0) / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(ci95_half_width(std::vector<double>{4.2}) == 0.0);
}

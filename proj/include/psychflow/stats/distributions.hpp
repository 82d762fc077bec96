#pragma once

namespace psychflow::stats {

/// Standard normal CDF.
double normal_cdf(double z);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_gamma_p(double a, double x);

/// Regularized incomplete beta I_x(a, b), a,b > 0, x in [0,1].
double reg_beta(double a, double b, double x);

/// Chi-squared CDF with k (> 0) degrees of freedom.
double chi2_cdf(double x, double k);

/// Student's t CDF with nu (> 0) degrees of freedom (nu need not be integer).
double student_t_cdf(double t, double nu);

/// Student's t quantile: smallest t with CDF(t) >= p, p in (0, 1).
double student_t_quantile(double p, double nu);

}  // namespace psychflow::stats

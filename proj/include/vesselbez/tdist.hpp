#pragma once

namespace vesselbez {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with `df` degrees of freedom (df > 0, may be fractional).
double student_t_cdf(double t, double df);

/// Two-sided p-value P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

/// Upper quantile: the t with P(T > t) = upper_tail. Bisection to 1e-10.
double student_t_upper_quantile(double upper_tail, double df);

/// Standard normal CDF and quantile, used for Wald intervals.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace vesselbez

#pragma once

namespace jase {

/// Logistic function 1 / (1 + exp(-x)).
double expit(double x) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Standard normal quantile for p in (0,1). Accurate to ~1e-15.
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Upper tail of a chi-squared distribution with (possibly non-integer)
/// degrees of freedom df > 0.
double chisq_survival(double x, double df);

}  // namespace jase

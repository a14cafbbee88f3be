#pragma once

namespace plpfrail::special {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// x such that P(a, x) = p, found by bracketing and safeguarded Newton with
/// relative tolerance 1e-12.
double gamma_p_inverse(double a, double p);

/// Log density of Gamma(shape, rate) at x > 0.
double gamma_log_pdf(double x, double shape, double rate);

/// Quantile of Gamma(shape, rate).
double gamma_quantile(double shape, double rate, double p);

/// Log density of N(mean, 1/precision) at x.
double normal_log_pdf(double x, double mean, double precision);

/// Log density of the log-normal whose log has mean `mean` and precision
/// `precision`, evaluated at z > 0.
double lognormal_log_pdf(double z, double mean, double precision);

}  // namespace plpfrail::special

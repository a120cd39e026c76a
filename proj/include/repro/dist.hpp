#pragma once

namespace repro {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// CDF of the F distribution with (d1, d2) degrees of freedom at x >= 0.
double f_cdf(int d1, int d2, double x);

// Quantile: the q with f_cdf(d1, d2, q) = level, level in (0, 1).
// Throws InvalidLevel outside the open interval.
double f_quantile(int d1, int d2, double level);

// log C(n, k)
double log_choose(int n, int k);

}  // namespace repro

#pragma once

namespace metacombine {

// Standard normal CDF. Absolute error below 1e-14 on finite inputs.
double norm_cdf(double x);

// Standard normal density.
double norm_pdf(double x);

// log(norm_cdf(x)), stable arbitrarily far into the left tail.
double norm_logcdf(double x);

// Inverse of norm_cdf on (0,1). Returns -inf at p=0 and +inf at p=1 so
// callers can map boundary p-values to infinite statistics.
double norm_quantile(double p);

// norm_cdf(hi) - norm_cdf(lo) without cancellation when both endpoints sit
// in the same tail.
double norm_interval_prob(double lo, double hi);

// Survival function of the chi-square distribution with even df >= 2,
// evaluated through the closed-form Poisson sum
//   Pr(X > a) = exp(-a/2) * sum_{i<df/2} (a/2)^i / i!.
double chisq_sf_even(int df, double a);

// Inverse of 1 - chisq_sf_even in its second argument: the p-quantile of
// the chi-square distribution with even df, for 0 <= p < 1. Bisection on
// the closed-form survival plus a Newton polish.
double chisq_quantile_even(int df, double p);

}  // namespace metacombine

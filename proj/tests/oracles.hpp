#pragma once

#include <cstddef>

// Test-side reference implementations, independent of the library's
// computation paths. The normal CDF runs a long double series /
// continued-fraction pair instead of std::erfc; chi-square survival uses
// the odd/even recurrence instead of the Poisson sum.
namespace oracle {

// Standard normal CDF to ~1e-18 absolute.
double norm_cdf(double x);

// Survival function of chi-square with any df >= 0 (df = 0 is the point
// mass at zero).
double chisq_sf(int df, double a);

// CDF of chi-square with any df >= 0.
double chisq_cdf(int df, double a);

// p-quantile of chi-square with df >= 1.
double chisq_quantile(int df, double p);

// Null law of the one-sided Gaussian LRT sum: the binomial mixture
// 2^-m sum_k C(m,k) chi-square_k. Survival, CDF and quantile.
double lrt_mixture_sf(int m, double a);
double lrt_mixture_cdf(int m, double a);
double lrt_mixture_quantile(int m, double p);

}  // namespace oracle

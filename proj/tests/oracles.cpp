#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

const long double kSqrtPi = 1.77245385090551602729816748334114518L;

// erf by the non-alternating scaled series: all terms positive, so no
// cancellation; converges fast for z up to ~6.
long double erf_series(long double z) {
    const long double z2 = 2.0L * z * z;
    long double term = z;
    long double sum = z;
    long double denom = 1.0L;
    for (int n = 1; n < 500; ++n) {
        denom += 2.0L;
        term *= z2 / denom;
        sum += term;
        if (term < sum * 1e-22L) break;
    }
    return 2.0L / kSqrtPi * std::exp(-z * z) * sum;
}

// erfc by the Lentz continued fraction, for z >= 6.
long double erfc_cf(long double z) {
    const long double z2 = z * z;
    long double c = 1e30L, d = 0.0L, f = 1.0L;
    // erfc(z) = exp(-z^2)/(z sqrt(pi)) * 1/(1 + a1/(1 + a2/(1 + ...)))
    // with a_n = n/(2 z^2).
    long double b = 1.0L;
    c = b;
    d = 0.0L;
    f = b;
    for (int n = 1; n < 300; ++n) {
        const long double a = n / (2.0L * z2);
        d = b + a * d;
        if (d == 0.0L) d = 1e-30L;
        c = b + a / c;
        if (c == 0.0L) c = 1e-30L;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0L) < 1e-22L) break;
    }
    return std::exp(-z2) / (z * kSqrtPi) / f;
}

long double erfc_ld(long double z) {
    if (z < 0.0L) return 2.0L - erfc_ld(-z);
    if (z < 6.0L) return 1.0L - erf_series(z);
    return erfc_cf(z);
}

}  // namespace

double norm_cdf(double x) {
    const long double z = -static_cast<long double>(x) / 1.41421356237309504880168872420969808L;
    return static_cast<double>(0.5L * erfc_ld(z));
}

double chisq_sf(int df, double a) {
    if (df < 0) throw std::invalid_argument("df must be >= 0");
    if (a < 0.0) return 1.0;
    if (df == 0) return 0.0;

    const long double x = a;
    long double sf;
    int k;
    if (df % 2 == 1) {
        sf = erfc_ld(std::sqrt(x / 2.0L));  // df = 1
        k = 1;
    } else {
        sf = std::exp(-x / 2.0L);  // df = 2
        k = 2;
    }
    // Pr(X_{k+2} > a) = Pr(X_k > a) + (a/2)^{k/2} e^{-a/2} / Gamma(k/2 + 1).
    while (k < df) {
        const long double half_k = k / 2.0L;
        const long double lg = std::lgamma(static_cast<double>(half_k + 1.0L));
        sf += std::exp(half_k * std::log(x / 2.0L) - x / 2.0L - lg);
        k += 2;
    }
    if (sf > 1.0L) sf = 1.0L;
    return static_cast<double>(sf);
}

double chisq_cdf(int df, double a) {
    if (df == 0) return a >= 0.0 ? 1.0 : 0.0;
    return 1.0 - chisq_sf(df, a);
}

double chisq_quantile(int df, double p) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in [0,1)");
    if (p == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (chisq_cdf(df, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chisq_cdf(df, mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

double binom(int m, int k) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (m - i) / (i + 1);
    return c;
}

}  // namespace

double lrt_mixture_sf(int m, double a) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const double scale = std::ldexp(1.0, -m);  // 2^-m
    double sf = 0.0;
    for (int k = 0; k <= m; ++k) sf += binom(m, k) * scale * chisq_sf(k, a);
    return sf;
}

double lrt_mixture_cdf(int m, double a) { return 1.0 - lrt_mixture_sf(m, a); }

double lrt_mixture_quantile(int m, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    double lo = 0.0, hi = 1.0;
    while (lrt_mixture_cdf(m, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (lrt_mixture_cdf(m, mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle

#include "metacombine/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace metacombine {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

void check_even_df(int df) {
    if (df < 2 || df % 2 != 0)
        throw std::invalid_argument("chi-square df must be an even integer >= 2, got " +
                                    std::to_string(df));
}

}  // namespace

double norm_cdf(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / kSqrt2Pi;
}

double norm_logcdf(double x) {
    if (x > -1.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
    // erfc loses relative accuracy approaching its underflow, so switch to
    // the Mills-ratio asymptotic while erfc still has ~1e-12 headroom.
    if (x > -23.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
    const double w = 1.0 / (x * x);
    const double series =
        1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 - w * 945.0))));
    return -0.5 * x * x - std::log(-x * kSqrt2Pi) + std::log(series);
}

double norm_quantile(double p) {
    if (std::isnan(p) || p < 0.0 || p > 1.0)
        throw std::invalid_argument("norm_quantile requires p in [0,1]");
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    // Acklam's rational approximation, then one Halley step against norm_cdf.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double err = norm_cdf(x) - p;
    const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
    if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double norm_interval_prob(double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (lo >= 0.0) return 0.5 * (std::erfc(lo / kSqrt2) - std::erfc(hi / kSqrt2));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi / kSqrt2) - std::erfc(-lo / kSqrt2));
    return 0.5 * (std::erf(hi / kSqrt2) - std::erf(lo / kSqrt2));
}

double chisq_sf_even(int df, double a) {
    check_even_df(df);
    if (std::isnan(a) || a < 0.0)
        throw std::invalid_argument("chisq_sf_even requires a >= 0");
    if (a == 0.0) return 1.0;
    if (std::isinf(a)) return 0.0;

    const int m = df / 2;
    const double half = 0.5 * a;
    // Terms are positive and evaluated in increasing index order; Neumaier
    // compensation keeps the running error below the 1e-13 identity budget.
    double term = 1.0;
    double sum = 1.0;
    double comp = 0.0;
    for (int i = 1; i < m; ++i) {
        term *= half / static_cast<double>(i);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    const double value = std::exp(-half) * (sum + comp);
    return value < 1.0 ? value : 1.0;
}

namespace {

// Chi-square density for even df, used only for the Newton polish.
double chisq_pdf_even(int df, double a) {
    if (a <= 0.0) return df == 2 ? 0.5 : 0.0;
    const int m = df / 2;
    double lg = 0.0;
    for (int i = 1; i < m; ++i) lg += std::log(static_cast<double>(i));
    return std::exp((m - 1) * std::log(0.5 * a) - 0.5 * a - lg) * 0.5;
}

}  // namespace

double chisq_quantile_even(int df, double p) {
    check_even_df(df);
    if (std::isnan(p) || p < 0.0 || p >= 1.0)
        throw std::invalid_argument("chisq_quantile_even requires 0 <= p < 1");
    if (p == 0.0) return 0.0;

    const double target = 1.0 - p;  // survival at the quantile
    double lo = 0.0;
    double hi = df + 40.0 * std::sqrt(static_cast<double>(df)) - 8.0 * std::log1p(-p);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (chisq_sf_even(df, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double f = chisq_sf_even(df, x) - target;
        const double dens = chisq_pdf_even(df, x);
        if (dens <= 0.0) break;
        const double step = f / dens;
        const double next = x + step;
        if (next <= lo || next >= hi) break;
        x = next;
    }
    return x;
}

}  // namespace metacombine

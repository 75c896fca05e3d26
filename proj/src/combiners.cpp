#include "metacombine/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "metacombine/power_engine.hpp"
#include "metacombine/special_functions.hpp"

namespace metacombine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PValueInterval exact_p(double p) {
    p = std::min(1.0, std::max(0.0, p));
    return PValueInterval{p, p, true};
}

// [2t - t^2, 2t] evaluated on a bracket [t_lo, t_hi]; both endpoint maps
// are increasing in t, so the matching sides keep the interval hard.
PValueInterval bonferroni_bracket(double tau_lo, double tau_hi) {
    const double lower = std::max(0.0, 2.0 * tau_lo - tau_lo * tau_lo);
    const double upper = std::min(1.0, 2.0 * tau_hi);
    return PValueInterval{lower, std::max(lower, upper), false};
}

}  // namespace

void validate_ptilde(std::span<const double> ptilde) {
    if (ptilde.empty()) throw std::invalid_argument("need at least one p-value");
    for (double p : ptilde)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("one-tailed p-values must lie in [0,1]");
}

double two_sided_from_one_sided(double ptilde) {
    if (!(ptilde >= 0.0 && ptilde <= 1.0))
        throw std::invalid_argument("one-tailed p-value must lie in [0,1]");
    return 2.0 * std::min(ptilde, 1.0 - ptilde);
}

StatFamilyResult fisher_stats(std::span<const double> ptilde) {
    validate_ptilde(ptilde);
    double left = 0.0, right = 0.0, undirected = 0.0;
    for (double p : ptilde) {
        left -= 2.0 * std::log(p);
        right -= 2.0 * std::log1p(-p);
        undirected -= 2.0 * std::log(2.0 * std::min(p, 1.0 - p));
    }
    return StatFamilyResult{left, right, undirected, std::max(left, right)};
}

StatFamilyResult stouffer_stats(std::span<const double> ptilde) {
    validate_ptilde(ptilde);
    const double root_m = std::sqrt(static_cast<double>(ptilde.size()));
    double right = 0.0, undirected = 0.0;
    for (double p : ptilde) {
        const double z = norm_quantile(p);
        right += z;
        undirected += std::abs(z);
    }
    right /= root_m;
    undirected /= root_m;
    const double left = -right;
    return StatFamilyResult{left, right, undirected, std::max(left, right)};
}

GaussianStats gaussian_stats(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("need at least one z score");
    double left = 0.0, right = 0.0, zu = 0.0;
    for (double v : z) {
        if (std::isnan(v)) throw std::invalid_argument("z scores must not be NaN");
        const double neg = std::min(v, 0.0);
        const double pos = std::max(v, 0.0);
        left += neg * neg;
        right += pos * pos;
        zu += v * v;
    }
    GaussianStats out;
    out.stats = StatFamilyResult{left, right, zu, std::max(left, right)};
    out.zu = zu;
    return out;
}

double t_lrt_stat(std::span<const double> t, std::span<const int> dof) {
    if (t.empty() || t.size() != dof.size())
        throw std::invalid_argument("t and dof must have equal positive length");
    double sum = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (dof[j] < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
        const double tp = std::max(t[j], 0.0);
        sum += (dof[j] + 1.0) * std::log1p(tp * tp / dof[j]);
    }
    return sum;
}

PValueInterval combined_pvalue(TestMethod method, double statistic, std::size_t m,
                               const GridSpec& grid) {
    if (!is_valid(method)) throw std::invalid_argument("invalid test method");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (std::isnan(statistic)) throw std::invalid_argument("statistic is NaN");

    const bool chi_scaled = !(method.family == TestFamily::Stouffer &&
                              method.side != Side::Undirected);
    if (chi_scaled && statistic < 0.0)
        throw std::invalid_argument("statistic must be >= 0 for this method");
    if (statistic == kInf) return PValueInterval{0.0, 0.0, true};

    const int df2m = static_cast<int>(2 * m);
    switch (method.family) {
        case TestFamily::Fisher:
            if (method.side == Side::Concordant) {
                const double tau = chisq_sf_even(df2m, statistic);
                return bonferroni_bracket(tau, tau);
            }
            return exact_p(chisq_sf_even(df2m, statistic));

        case TestFamily::Stouffer:
            if (method.side == Side::Left || method.side == Side::Right)
                return exact_p(norm_cdf(-statistic));
            if (method.side == Side::Concordant)
                return exact_p(2.0 * norm_cdf(-statistic));
            // S^U has no closed form; use the FFT null bounds.
            {
                const PValueInterval tail = tail_bounds(
                    null_bound_pair(method, m, grid, 1e-9, statistic * 1.1), statistic);
                return PValueInterval{tail.lower, tail.upper, false};
            }

        case TestFamily::Lrt: {
            const TestMethod lambda_left{TestFamily::Lrt, Side::Left};
            if (method.side == Side::Concordant) {
                const PValueInterval tau = tail_bounds(
                    null_bound_pair(lambda_left, m, grid, 1e-9, statistic * 1.1),
                    statistic);
                return bonferroni_bracket(tau.lower, tau.upper);
            }
            const PValueInterval tail = tail_bounds(
                null_bound_pair(method, m, grid, 1e-9, statistic * 1.1), statistic);
            return PValueInterval{tail.lower, tail.upper, false};
        }

        case TestFamily::GaussianSquare:
            if (m % 2 == 0) return exact_p(chisq_sf_even(static_cast<int>(m), statistic));
            {
                const PValueInterval tail = tail_bounds(
                    null_bound_pair(method, m, grid, 1e-9, statistic * 1.1), statistic);
                return PValueInterval{tail.lower, tail.upper, false};
            }

        case TestFamily::TLrt:
            throw std::invalid_argument(
                "no null law is available for the t likelihood ratio statistic");
    }
    throw std::invalid_argument("unsupported method");
}

}  // namespace metacombine

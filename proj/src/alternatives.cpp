#include "metacombine/alternatives.hpp"

#include <cmath>
#include <stdexcept>

#include "metacombine/special_functions.hpp"

namespace metacombine {

AlternativeSpec AlternativeSpec::pattern(std::size_t k_pos, std::size_t k_neg,
                                         double delta, std::size_t m) {
    if (m < 1) throw std::invalid_argument("pattern requires m >= 1");
    if (k_pos + k_neg > m)
        throw std::invalid_argument("pattern has more nonzero entries than m");
    if (delta < 0.0) throw std::invalid_argument("pattern delta must be >= 0");
    AlternativeSpec spec;
    spec.beta.assign(m, 0.0);
    for (std::size_t i = 0; i < k_pos; ++i) spec.beta[i] = delta;
    for (std::size_t i = 0; i < k_neg; ++i) spec.beta[k_pos + i] = -delta;
    return spec;
}

double AlternativeSpec::tau() const {
    double ss = 0.0;
    for (double b : beta) ss += b * b;
    return std::sqrt(ss);
}

double AlternativeSpec::beta_sum() const {
    double s = 0.0;
    for (double b : beta) s += b;
    return s;
}

bool AlternativeSpec::is_null() const {
    for (double b : beta)
        if (b != 0.0) return false;
    return true;
}

namespace {

// qnorm(exp(-y/2)) without intermediate underflow for large y: past the
// double range the quantile's leading behaviour -sqrt(y - log ...) is used.
double quantile_of_exp_half(double y) {
    const double u = std::exp(-0.5 * y);
    if (u > 0.0) return norm_quantile(u);
    // log u = -y/2; Phi(x) ~ phi(x)/|x| for x -> -inf gives
    // x ~ -sqrt(-2 log u - log(2 pi (-2 log u))).
    const double l = y;  // -2 log u
    return -std::sqrt(std::max(0.0, l - std::log(2.0 * M_PI * l)));
}

}  // namespace

CdfFn summand_cdf(SummandFamily family, Side side, double beta_j, std::size_t m) {
    switch (family) {
        case SummandFamily::Lrt:
            if (side == Side::Left)
                return [beta_j](double y) {
                    if (y < 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    return norm_cdf(std::sqrt(y) + beta_j);
                };
            if (side == Side::Right)
                return [beta_j](double y) {
                    if (y < 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    return norm_cdf(std::sqrt(y) - beta_j);
                };
            break;
        case SummandFamily::Fisher:
            if (side == Side::Left)
                return [beta_j](double y) {
                    if (y <= 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    return norm_cdf(beta_j - quantile_of_exp_half(y));
                };
            if (side == Side::Right)
                return [beta_j](double y) {
                    if (y <= 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    return norm_cdf(-beta_j - quantile_of_exp_half(y));
                };
            if (side == Side::Undirected)
                // The summand is -2 log(2 Phi(-|Z|)); its CDF is the central
                // interval Phi(beta + c) - Phi(beta - c) with
                // c = -qnorm(exp(-y/2)/2), evaluated without cancellation.
                return [beta_j](double y) {
                    if (y < 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    const double u = 0.5 * std::exp(-0.5 * y);
                    const double c = -norm_quantile(u);
                    if (c <= 0.0) return 0.0;  // y below -2 log 1 = 0 region
                    return norm_interval_prob(beta_j - c, beta_j + c);
                };
            break;
        case SummandFamily::StoufferU:
            if (side == Side::Undirected) {
                const double root_m = std::sqrt(static_cast<double>(m));
                return [beta_j, root_m](double y) {
                    if (y < 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    return norm_interval_prob(-root_m * y - beta_j, root_m * y - beta_j);
                };
            }
            break;
        case SummandFamily::GaussianSquare:
            if (side == Side::Undirected)
                return [beta_j](double y) {
                    if (y < 0.0) return 0.0;
                    if (std::isinf(y)) return 1.0;
                    const double r = std::sqrt(y);
                    return norm_interval_prob(-r - beta_j, r - beta_j);
                };
            break;
    }
    throw std::invalid_argument("invalid summand family/side combination");
}

double stouffer_analytic_power(const AlternativeSpec& spec, Side side, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
    if (spec.m() < 1) throw std::invalid_argument("empty alternative");

    const double mu = spec.beta_sum() / std::sqrt(static_cast<double>(spec.m()));
    switch (side) {
        case Side::Right:
            return norm_cdf(mu - norm_quantile(1.0 - alpha));
        case Side::Left:
            return norm_cdf(-mu - norm_quantile(1.0 - alpha));
        case Side::Concordant: {
            const double c = norm_quantile(1.0 - 0.5 * alpha);
            return norm_cdf(mu - c) + norm_cdf(-mu - c);
        }
        default:
            throw std::invalid_argument(
                "analytic Stouffer power covers left/right/concordant only");
    }
}

}  // namespace metacombine

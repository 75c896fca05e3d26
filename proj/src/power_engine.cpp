#include "metacombine/power_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include "metacombine/errors.hpp"
#include "metacombine/rng.hpp"
#include "metacombine/special_functions.hpp"

namespace metacombine {

namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 21;
constexpr double kLog2 = 0.6931471805599453094;

struct SummandKey {
    SummandFamily family;
    Side side;
};

SummandKey summand_for(TestMethod method) {
    switch (method.family) {
        case TestFamily::Fisher:
            if (method.side != Side::Concordant)
                return {SummandFamily::Fisher, method.side};
            break;
        case TestFamily::Stouffer:
            if (method.side == Side::Undirected)
                return {SummandFamily::StoufferU, Side::Undirected};
            break;
        case TestFamily::Lrt:
            if (method.side != Side::Concordant) return {SummandFamily::Lrt, method.side};
            break;
        case TestFamily::GaussianSquare:
            return {SummandFamily::GaussianSquare, Side::Undirected};
        default:
            break;
    }
    throw std::invalid_argument("method " + method_name(method) +
                                " has no single-sum summand decomposition");
}

// Smallest y with 1 - cdf(y) <= eps, by doubling then bisection.
double tail_quantile(const CdfFn& cdf, double eps) {
    double hi = 1.0;
    int guard = 0;
    while (1.0 - cdf(hi) > eps) {
        hi *= 2.0;
        if (++guard > 60) return hi;
    }
    double lo = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (1.0 - cdf(mid) <= eps)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Mean and variance of a nonnegative summand by tail integration on
// [0, q]; feeds the range heuristic only, so trapezoid accuracy is plenty.
void summand_moments(const CdfFn& cdf, double q, double& mean, double& var) {
    constexpr int kSteps = 512;
    const double h = q / kSteps;
    double m1 = 0.0, m2 = 0.0;
    double prev_s = 1.0 - cdf(0.0);
    for (int i = 1; i <= kSteps; ++i) {
        const double y = i * h;
        const double s = 1.0 - cdf(y);
        m1 += 0.5 * h * (prev_s + s);
        m2 += 0.5 * h * (2.0 * (y - h) * prev_s + 2.0 * y * s);
        prev_s = s;
    }
    mean = m1;
    var = std::max(0.0, m2 - m1 * m1);
}

// Range the grid must span so the sum's upper tail beyond it stays under
// tail_eps. The bulk estimate (sum of means + 12 sigma) is checked against
// the worst single summand; the +inf atom is verified after the build and
// the range doubled on a miss, so this only has to be a good guess.
double estimate_range(const std::vector<CdfFn>& summands, double tail_eps) {
    const double per = std::max(tail_eps, 1e-12) / static_cast<double>(summands.size());
    double mean_sum = 0.0, var_sum = 0.0, max_q = 0.0;
    for (const CdfFn& cdf : summands) {
        const double q = tail_quantile(cdf, per);
        max_q = std::max(max_q, q);
        double mean = 0.0, var = 0.0;
        summand_moments(cdf, q, mean, var);
        mean_sum += mean;
        var_sum += var;
    }
    return std::max(mean_sum + 12.0 * std::sqrt(var_sum), max_q);
}

struct ResolvedGrid {
    double eta;
    std::size_t n;
    double range() const { return eta * static_cast<double>(n - 1); }
};

ResolvedGrid grid_for_range(const GridSpec& spec, double range) {
    if (!spec.auto_range || range <= spec.eta * static_cast<double>(spec.n - 1))
        return {spec.eta, spec.n};
    const std::size_t need =
        static_cast<std::size_t>(std::ceil(range / spec.eta)) + 2;
    if (need <= kMaxGridPoints) return {spec.eta, need};
    return {range / static_cast<double>(kMaxGridPoints - 1), kMaxGridPoints};
}

ResolvedGrid grow(const ResolvedGrid& rg) {
    if (rg.n * 2 <= kMaxGridPoints) return {rg.eta, rg.n * 2};
    return {rg.eta * 2.0, rg.n};
}

std::vector<CdfFn> make_summands(SummandKey key, const std::vector<double>& betas,
                                 std::size_t m) {
    std::vector<CdfFn> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back(summand_cdf(key.family, key.side, b, m));
    return out;
}

// Convolve the summand bracket for each beta; identical betas share one
// discretization and a repeated-squaring fold.
BoundPair build_on_grid(SummandKey key, const std::vector<double>& betas, std::size_t m,
                        const ResolvedGrid& rg) {
    std::map<double, std::uint64_t> groups;
    for (double b : betas) ++groups[b];

    bool have = false;
    BoundPair acc{GridDistribution::point_mass(rg.eta, 0),
                  GridDistribution::point_mass(rg.eta, 0)};
    for (const auto& [beta, count] : groups) {
        const BoundPair one = discretize(summand_cdf(key.family, key.side, beta, m),
                                         rg.eta, rg.n);
        const BoundPair block = self_convolve(one, count, rg.n);
        acc = have ? convolve_pair(acc, block, rg.n) : block;
        have = true;
    }
    return acc;
}

BoundPair build_auto(SummandKey key, const std::vector<double>& betas, std::size_t m,
                     const GridSpec& spec, double tail_eps, double min_range) {
    ResolvedGrid rg =
        spec.auto_range
            ? grid_for_range(spec, std::max(estimate_range(make_summands(key, betas, m),
                                                           tail_eps),
                                            min_range))
            : ResolvedGrid{spec.eta, spec.n};
    BoundPair pair = build_on_grid(key, betas, m, rg);
    for (int attempt = 0; attempt < 3 && spec.auto_range; ++attempt) {
        if (pair.upper.mass_pos_inf() <= tail_eps * 1.01) break;
        rg = grow(rg);
        pair = build_on_grid(key, betas, m, rg);
    }
    return pair;
}

double env_thread_cap() {
    const char* raw = std::getenv("METACOMBINE_THREADS");
    if (!raw) return 0;
    return std::strtod(raw, nullptr);
}

}  // namespace

unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    n = std::min(n, 8u);
    const double cap = env_thread_cap();
    if (cap >= 1.0) n = std::min(n, static_cast<unsigned>(std::min(cap, 64.0)));
    return std::max(1u, n);
}

BoundPair alternative_bound_pair(SummandFamily family, Side side,
                                 const std::vector<double>& betas, const GridSpec& grid,
                                 double tail_eps) {
    if (betas.empty()) throw std::invalid_argument("need at least one summand");
    return build_auto({family, side}, betas, betas.size(), grid, tail_eps, 0.0);
}

BoundPair null_bound_pair(TestMethod method, std::size_t m, const GridSpec& grid,
                          double tail_eps, double min_range) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const SummandKey key = summand_for(method);
    return build_auto(key, std::vector<double>(m, 0.0), m, grid, tail_eps, min_range);
}

RealInterval critical_bounds(TestMethod method, std::size_t m, double alpha,
                             const GridSpec& grid) {
    if (!is_valid(method)) throw std::invalid_argument("invalid test method");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");

    const double tail_eps = alpha * 1e-3;
    const int df2m = static_cast<int>(2 * m);
    switch (method.family) {
        case TestFamily::Fisher: {
            const double level = method.side == Side::Concordant ? 1.0 - 0.5 * alpha
                                                                 : 1.0 - alpha;
            const double q = chisq_quantile_even(df2m, level);
            return {q, q};
        }
        case TestFamily::Stouffer: {
            if (method.side == Side::Undirected) {
                const BoundPair null = null_bound_pair(method, m, grid, tail_eps);
                return quantile_bounds(null, 1.0 - alpha);
            }
            const double level = method.side == Side::Concordant ? 1.0 - 0.5 * alpha
                                                                 : 1.0 - alpha;
            const double q = norm_quantile(level);
            return {q, q};
        }
        case TestFamily::Lrt: {
            const bool concordant = method.side == Side::Concordant;
            const TestMethod marginal{TestFamily::Lrt,
                                      concordant ? Side::Left : method.side};
            const BoundPair null = null_bound_pair(marginal, m, grid, tail_eps);
            return quantile_bounds(null, concordant ? 1.0 - 0.5 * alpha : 1.0 - alpha);
        }
        case TestFamily::GaussianSquare: {
            if (m % 2 == 0) {
                const double q =
                    chisq_quantile_even(static_cast<int>(m), 1.0 - alpha);
                return {q, q};
            }
            const BoundPair null = null_bound_pair(method, m, grid, tail_eps);
            return quantile_bounds(null, 1.0 - alpha);
        }
        case TestFamily::TLrt:
            throw std::invalid_argument(
                "no null law is available for the t likelihood ratio statistic");
    }
    throw std::invalid_argument("unsupported method");
}

RealInterval concordant_level_interval(TestMethod method, std::size_t m, double alpha,
                                       const GridSpec& grid) {
    if (method.side != Side::Concordant)
        throw std::invalid_argument("level interval applies to concordant tests");
    if (method.family == TestFamily::Fisher || method.family == TestFamily::Stouffer)
        return {alpha - 0.25 * alpha * alpha, alpha};
    if (method.family != TestFamily::Lrt)
        throw std::invalid_argument("unsupported concordant method");

    const RealInterval crit = critical_bounds(method, m, alpha, grid);
    const BoundPair null =
        null_bound_pair({TestFamily::Lrt, Side::Left}, m, grid, alpha * 1e-3);
    const double tau_hi = tail_bounds(null, crit.lower).upper;
    const double tau_lo = tail_bounds(null, crit.upper).lower;
    return {std::max(0.0, 2.0 * tau_lo - tau_lo * tau_lo), std::min(1.0, 2.0 * tau_hi)};
}

namespace {

PowerInterval clamp_interval(double lo, double hi) {
    lo = std::min(1.0, std::max(0.0, lo));
    hi = std::min(1.0, std::max(0.0, hi));
    if (lo > hi) lo = hi;
    return PowerInterval{lo, hi, std::nullopt};
}

PowerInterval concordant_power(TestMethod method, const AlternativeSpec& spec,
                               double alpha, const GridSpec& grid) {
    const std::size_t m = spec.m();
    const RealInterval crit = critical_bounds(method, m, alpha, grid);
    const double tail_eps = alpha * 1e-3;

    const SummandFamily fam = method.family == TestFamily::Fisher
                                  ? SummandFamily::Fisher
                                  : SummandFamily::Lrt;
    const SummandKey key_l{fam, Side::Left};
    const SummandKey key_r{fam, Side::Right};

    // Both marginals share one grid so max_combine lines up.
    const double range =
        std::max({estimate_range(make_summands(key_l, spec.beta, m), tail_eps),
                  estimate_range(make_summands(key_r, spec.beta, m), tail_eps),
                  crit.upper * 1.05});
    ResolvedGrid rg = grid_for_range(grid, range);
    BoundPair left = build_on_grid(key_l, spec.beta, m, rg);
    BoundPair right = build_on_grid(key_r, spec.beta, m, rg);
    for (int attempt = 0; attempt < 3 && grid.auto_range; ++attempt) {
        if (left.upper.mass_pos_inf() <= tail_eps * 1.01 &&
            right.upper.mass_pos_inf() <= tail_eps * 1.01)
            break;
        rg = grow(rg);
        left = build_on_grid(key_l, spec.beta, m, rg);
        right = build_on_grid(key_r, spec.beta, m, rg);
    }

    // Route 1: the combined bracket for max(L, R).
    const BoundPair combined = max_combine(left, right);
    const double a_lo = tail_bounds(combined, crit.upper).lower;
    const double a_hi = tail_bounds(combined, crit.lower).upper;

    // Route 2: P_L + P_R - P_L P_R <= P_T <= P_L + P_R on the marginals.
    const double pl_lo = tail_bounds(left, crit.upper).lower;
    const double pr_lo = tail_bounds(right, crit.upper).lower;
    const double pl_hi = tail_bounds(left, crit.lower).upper;
    const double pr_hi = tail_bounds(right, crit.lower).upper;
    const double b_lo = pl_lo + pr_lo - pl_lo * pr_lo;
    const double b_hi = pl_hi + pr_hi;

    return clamp_interval(std::max(a_lo, b_lo), std::min(a_hi, b_hi));
}

}  // namespace

PowerInterval power_bounds(TestMethod method, const AlternativeSpec& spec, double alpha,
                           const GridSpec& grid) {
    if (!is_valid(method)) throw std::invalid_argument("invalid test method");
    if (spec.m() < 1) throw std::invalid_argument("empty alternative");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");

    if (method.family == TestFamily::Stouffer && method.side != Side::Undirected) {
        const double p = stouffer_analytic_power(spec, method.side, alpha);
        return PowerInterval{p, p, std::nullopt};
    }
    if (method.side == Side::Concordant)
        return concordant_power(method, spec, alpha, grid);

    const RealInterval crit = critical_bounds(method, spec.m(), alpha, grid);
    const SummandKey key = summand_for(method);
    const BoundPair pair =
        build_auto(key, spec.beta, spec.m(), grid, alpha * 1e-3, crit.upper * 1.05);
    const double lo = tail_bounds(pair, crit.upper).lower;
    const double hi = tail_bounds(pair, crit.lower).upper;
    return clamp_interval(lo, hi);
}

double statistic_from_z(TestMethod method, std::span<const double> z) {
    switch (method.family) {
        case TestFamily::Fisher: {
            double left = 0.0, right = 0.0, undirected = 0.0;
            for (double v : z) {
                if (method.side == Side::Left || method.side == Side::Concordant)
                    left -= 2.0 * norm_logcdf(v);
                if (method.side == Side::Right || method.side == Side::Concordant)
                    right -= 2.0 * norm_logcdf(-v);
                if (method.side == Side::Undirected)
                    undirected -= 2.0 * (kLog2 + norm_logcdf(-std::abs(v)));
            }
            switch (method.side) {
                case Side::Left: return left;
                case Side::Right: return right;
                case Side::Undirected: return undirected;
                case Side::Concordant: return std::max(left, right);
            }
            break;
        }
        case TestFamily::Stouffer: {
            const double root_m = std::sqrt(static_cast<double>(z.size()));
            double sum = 0.0, abs_sum = 0.0;
            for (double v : z) {
                sum += v;
                abs_sum += std::abs(v);
            }
            switch (method.side) {
                case Side::Left: return -sum / root_m;
                case Side::Right: return sum / root_m;
                case Side::Undirected: return abs_sum / root_m;
                case Side::Concordant: return std::abs(sum) / root_m;
            }
            break;
        }
        case TestFamily::Lrt: {
            double left = 0.0, right = 0.0;
            for (double v : z) {
                const double neg = std::min(v, 0.0);
                const double pos = std::max(v, 0.0);
                left += neg * neg;
                right += pos * pos;
            }
            switch (method.side) {
                case Side::Left: return left;
                case Side::Right: return right;
                case Side::Concordant: return std::max(left, right);
                default: break;
            }
            break;
        }
        case TestFamily::GaussianSquare: {
            double zu = 0.0;
            for (double v : z) zu += v * v;
            return zu;
        }
        case TestFamily::TLrt:
            break;
    }
    throw std::invalid_argument("cannot evaluate " + method_name(method) +
                                " from z scores");
}

RealInterval agresti_interval(double pi_hat, std::uint64_t n, double ci_alpha) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (!(ci_alpha > 0.0 && ci_alpha < 1.0))
        throw std::invalid_argument("ci_alpha must lie in (0,1)");
    const double zq = norm_quantile(1.0 - 0.5 * ci_alpha);
    const double pseudo = zq * zq;
    const double nn = static_cast<double>(n);
    const double pi_tilde = (nn * pi_hat + 0.5 * pseudo) / (nn + pseudo);
    const double half = zq * std::sqrt(pi_tilde * (1.0 - pi_tilde) / nn);
    return {std::max(0.0, pi_tilde - half), std::min(1.0, pi_tilde + half)};
}

McSummary mc_power(TestMethod method, const AlternativeSpec& spec, double alpha,
                   std::uint64_t n, std::uint64_t seed, double ci_alpha,
                   const GridSpec& grid) {
    if (n < 100) throw std::invalid_argument("Monte Carlo needs n >= 100");
    const RealInterval crit = critical_bounds(method, spec.m(), alpha, grid);
    const double threshold = crit.midpoint();

    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), n));
    std::vector<std::uint64_t> counts(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t m = spec.m();
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::uint64_t begin = n * w / workers;
            const std::uint64_t end = n * (w + 1) / workers;
            std::vector<double> z(m);
            std::uint64_t local = 0;
            for (std::uint64_t i = begin; i < end; ++i) {
                for (std::size_t j = 0; j < m; ++j)
                    z[j] = spec.beta[j] + normal_draw(seed, i, j);
                if (statistic_from_z(method, z) > threshold) ++local;
            }
            counts[w] = local;
        });
    }
    for (auto& t : pool) t.join();

    std::uint64_t hits = 0;
    for (std::uint64_t c : counts) hits += c;
    const double estimate = static_cast<double>(hits) / static_cast<double>(n);

    McSummary out;
    out.estimate = estimate;
    out.ci = agresti_interval(estimate, n, ci_alpha);
    out.seed = seed;
    out.n = n;
    out.critical = threshold;
    return out;
}

CalibrationResult calibrate_delta(std::size_t m, std::size_t k_pos, std::size_t k_neg,
                                  double target, double alpha, const GridSpec& grid) {
    const std::size_t k = k_pos + k_neg;
    if (k < 1 || k > m) throw std::invalid_argument("need 1 <= k_pos + k_neg <= m");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(target > alpha && target < 1.0))
        throw std::invalid_argument("target power must lie in (alpha, 1)");

    const TestMethod zu{TestFamily::GaussianSquare, Side::Undirected};
    const double tail_eps = alpha * 1e-3;

    // Z^U power depends on beta only through k * delta^2, so signs are
    // irrelevant here and one positive group suffices.
    auto quick_power = [&](double delta) {
        const PowerInterval p =
            power_bounds(zu, AlternativeSpec::pattern(k, 0, delta, m), alpha, grid);
        return 0.5 * (p.lower + p.upper);
    };

    double hi = 0.25;
    int guard = 0;
    while (quick_power(hi) < target) {
        hi *= 2.0;
        if (++guard > 24)
            throw std::runtime_error("calibration target power is unreachable");
    }

    // Freeze one grid wide enough for the largest delta, so every bisection
    // step sees the same discretization and the central block is reused.
    const SummandKey key{SummandFamily::GaussianSquare, Side::Undirected};
    const std::vector<double> betas_hi = AlternativeSpec::pattern(k, 0, hi, m).beta;
    const ResolvedGrid rg =
        grid.auto_range
            ? grid_for_range(grid, estimate_range(make_summands(key, betas_hi, m),
                                                  tail_eps))
            : ResolvedGrid{grid.eta, grid.n};
    const GridSpec fixed{rg.eta, rg.n, false};

    const RealInterval crit = critical_bounds(zu, m, alpha, fixed);
    const BoundPair unit_null = discretize(summand_cdf(key.family, key.side, 0.0, m),
                                           rg.eta, rg.n);
    const BoundPair central =
        m > k ? self_convolve(unit_null, m - k, rg.n)
              : BoundPair{GridDistribution::point_mass(rg.eta, 0),
                          GridDistribution::point_mass(rg.eta, 0)};

    auto bracket_at = [&](double delta) {
        const BoundPair shifted = discretize(
            summand_cdf(key.family, key.side, delta, m), rg.eta, rg.n);
        BoundPair pair = self_convolve(shifted, k, rg.n);
        if (m > k) pair = convolve_pair(pair, central, rg.n);
        return RealInterval{tail_bounds(pair, crit.upper).lower,
                            tail_bounds(pair, crit.lower).upper};
    };

    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const RealInterval b = bracket_at(mid);
        if (b.lower >= target - 0.002 && b.upper <= target + 0.002)
            return CalibrationResult{mid, b.lower, b.upper};
        if (b.midpoint() < target)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("delta calibration did not converge in 200 bisections");
}

std::vector<CurvePoint> power_curve(const std::vector<TestMethod>& methods,
                                    const CurveScenario& scenario, double alpha,
                                    const GridSpec& grid, const McConfig* mc) {
    if (methods.empty()) throw std::invalid_argument("need at least one method");
    if (scenario.m < 1) throw std::invalid_argument("m must be >= 1");

    std::vector<std::size_t> ks = scenario.ks;
    if (ks.empty())
        for (std::size_t k = 1; k <= scenario.m; ++k) ks.push_back(k);

    struct Point {
        std::size_t k;
        double delta;
        AlternativeSpec spec;
    };
    std::vector<Point> points;
    if (scenario.mode == CurveMode::DeltaSweep) {
        if (scenario.deltas.empty())
            throw std::invalid_argument("delta sweep needs explicit deltas");
        for (std::size_t k : ks)
            for (double d : scenario.deltas)
                points.push_back({k, d, AlternativeSpec::pattern(k, 0, d, scenario.m)});
    } else {
        const bool one_negative = scenario.mode == CurveMode::CalibratedOneNegative;
        for (std::size_t k : ks) {
            const std::size_t k_pos = one_negative ? k - 1 : k;
            const std::size_t k_neg = one_negative ? 1 : 0;
            const CalibrationResult cal =
                calibrate_delta(scenario.m, k_pos, k_neg, scenario.target, alpha, grid);
            points.push_back(
                {k, cal.delta,
                 AlternativeSpec::pattern(k_pos, k_neg, cal.delta, scenario.m)});
        }
    }

    std::vector<CurvePoint> rows;
    rows.reserve(points.size() * methods.size());
    for (const Point& pt : points) {
        for (TestMethod method : methods) {
            CurvePoint row;
            row.method = method;
            row.k = pt.k;
            row.delta = pt.delta;
            row.power = power_bounds(method, pt.spec, alpha, grid);
            if (mc && mc->n > 0)
                row.power.mc =
                    mc_power(method, pt.spec, alpha, mc->n, mc->seed, mc->ci_alpha, grid);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace metacombine

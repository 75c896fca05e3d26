#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "metacombine/alternatives.hpp"
#include "metacombine/grid_distribution.hpp"
#include "metacombine/types.hpp"

namespace metacombine {

// Monte Carlo summary attached to a power interval.
struct McSummary {
    double estimate = 0.0;
    RealInterval ci{0.0, 1.0};
    std::uint64_t seed = 0;
    std::uint64_t n = 0;
    double critical = 0.0;  // threshold the draws were compared against
};

// Hard power (or level) bounds, optionally with a Monte Carlo cross-check.
struct PowerInterval {
    double lower = 0.0;
    double upper = 1.0;
    std::optional<McSummary> mc;

    // False when an attached MC confidence interval misses [lower, upper].
    bool consistent() const {
        if (!mc) return true;
        return mc->ci.upper >= lower && mc->ci.lower <= upper;
    }
};

struct CalibrationResult {
    double delta = 0.0;
    double power_lower = 0.0;  // Z^U power bracket at delta
    double power_upper = 0.0;
};

enum class CurveMode {
    DeltaSweep,            // explicit k x delta grid
    CalibratedConcordant,  // k positive components, delta calibrated per k
    CalibratedOneNegative  // k-1 positive and one negative component
};

struct CurveScenario {
    CurveMode mode = CurveMode::CalibratedConcordant;
    std::size_t m = 16;
    std::vector<std::size_t> ks;    // sweep over the number of nonzero betas
    std::vector<double> deltas;     // DeltaSweep only
    double target = 0.8;            // calibrated modes: Z^U power target
};

struct CurvePoint {
    TestMethod method;
    std::size_t k = 0;
    double delta = 0.0;
    PowerInterval power;
};

struct McConfig {
    std::uint64_t n = 0;  // 0 disables the Monte Carlo columns
    std::uint64_t seed = 1;
    double ci_alpha = 0.001;
};

// Bracket for the null distribution of a statistic that lacks a closed
// form (and, for validation, of any sum-type statistic). tail_eps is the
// mass the grid may leave beyond its top point; min_range forces the grid
// to reach at least that value.
BoundPair null_bound_pair(TestMethod method, std::size_t m, const GridSpec& grid,
                          double tail_eps = 1e-9, double min_range = 0.0);

// Bracket the sum of the (family, side) summands under the given betas.
BoundPair alternative_bound_pair(SummandFamily family, Side side,
                                 const std::vector<double>& betas,
                                 const GridSpec& grid, double tail_eps);

// Hard bracket for the critical value of the level-alpha test. Closed
// forms give degenerate (point) intervals; FFT-backed methods give real
// brackets. Throws ResolutionError when the grid cannot resolve it.
RealInterval critical_bounds(TestMethod method, std::size_t m, double alpha,
                             const GridSpec& grid = GridSpec{});

// Guaranteed attained-level bracket of a concordant test run at its
// Bonferroni critical value.
RealInterval concordant_level_interval(TestMethod method, std::size_t m, double alpha,
                                       const GridSpec& grid = GridSpec{});

// Hard power bounds under a Gaussian alternative: the upper limit is the
// upper tail bound at the critical value's lower bound, and vice versa.
// Concordant families intersect the max-combined bracket with the
// P_L + P_R - P_L P_R <= P_T <= P_L + P_R bracket. Stouffer left/right/
// concordant are exact without any FFT.
PowerInterval power_bounds(TestMethod method, const AlternativeSpec& spec, double alpha,
                           const GridSpec& grid = GridSpec{});

// Seeded Monte Carlo power estimate with an Agresti pseudo-count interval.
// Draws are compared against the closed-form critical value where one
// exists, else against the midpoint of the FFT critical bracket.
McSummary mc_power(TestMethod method, const AlternativeSpec& spec, double alpha,
                   std::uint64_t n, std::uint64_t seed, double ci_alpha = 0.001,
                   const GridSpec& grid = GridSpec{});

// Wald interval after adding norm_quantile(1-ci_alpha/2)^2 pseudo-counts,
// split evenly between successes and failures.
RealInterval agresti_interval(double pi_hat, std::uint64_t n, double ci_alpha);

// Delta such that the Z^U test's power bracket at pattern(k_pos, k_neg,
// delta, m) straddles the target. Bisection on the bracket midpoint; the
// returned bracket records the residual width.
CalibrationResult calibrate_delta(std::size_t m, std::size_t k_pos, std::size_t k_neg,
                                  double target, double alpha,
                                  const GridSpec& grid = GridSpec{});

// One row per (method, sweep point). Calibrated modes choose delta_k so
// Z^U has the target power, as in the k-sweep power comparisons.
std::vector<CurvePoint> power_curve(const std::vector<TestMethod>& methods,
                                    const CurveScenario& scenario, double alpha,
                                    const GridSpec& grid = GridSpec{},
                                    const McConfig* mc = nullptr);

// Statistic of the method evaluated on raw z scores (log-space where the
// p-value route would underflow).
double statistic_from_z(TestMethod method, std::span<const double> z);

// Worker cap honoring the METACOMBINE_THREADS environment variable.
unsigned worker_count();

}  // namespace metacombine

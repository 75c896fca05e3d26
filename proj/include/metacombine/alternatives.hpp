#pragma once

#include <cstddef>
#include <vector>

#include "metacombine/grid_distribution.hpp"
#include "metacombine/types.hpp"

namespace metacombine {

// A Gaussian alternative: estimates are independent N(beta_j, 1).
struct AlternativeSpec {
    std::vector<double> beta;

    // k_pos entries at +delta, k_neg at -delta, the rest of the m entries 0.
    static AlternativeSpec pattern(std::size_t k_pos, std::size_t k_neg, double delta,
                                   std::size_t m);

    std::size_t m() const { return beta.size(); }
    double tau() const;        // ||beta||
    double beta_sum() const;   // sum of beta_j
    bool is_null() const;      // all beta_j == 0
};

// The statistic families whose summand laws the engine convolves.
enum class SummandFamily { Lrt, Fisher, StoufferU, GaussianSquare };

// Exact CDF of one summand of the designated statistic under beta_j:
//   Lrt left        max(0,-Z)^2        Phi(sqrt(y) + beta)
//   Lrt right       max(0,Z)^2         Phi(sqrt(y) - beta)
//   Fisher left     -2 log Phi(Z)      Phi(beta - qnorm(exp(-y/2)))
//   Fisher right    -2 log Phi(-Z)     Phi(-beta - qnorm(exp(-y/2)))
//   Fisher undir    -2 log(2 Phi(-|Z|))
//   StoufferU       |Z|/sqrt(m)        needs the family size m
//   GaussianSquare  Z^2
// Evaluators return 0 for y < 0 and tend to 1 as y -> inf.
CdfFn summand_cdf(SummandFamily family, Side side, double beta_j, std::size_t m = 1);

// Closed-form power of the Stouffer tests: S^R is N(beta_sum/sqrt(m), 1),
// S^L = -S^R, S^C = |S^R|, so no convolution is needed.
double stouffer_analytic_power(const AlternativeSpec& spec, Side side, double alpha);

}  // namespace metacombine

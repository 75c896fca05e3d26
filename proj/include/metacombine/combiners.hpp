#pragma once

#include <span>
#include <vector>

#include "metacombine/grid_distribution.hpp"
#include "metacombine/types.hpp"

namespace metacombine {

// Left/right/undirected/concordant statistics of one family evaluated on a
// vector of one-tailed p-values. Boundary p-values yield +inf components.
struct StatFamilyResult {
    double left = 0.0;
    double right = 0.0;
    double undirected = 0.0;
    double concordant = 0.0;
};

struct GaussianStats {
    StatFamilyResult stats;  // LRT lambda^{L,R}, concordant; undirected = zu
    double zu = 0.0;         // sum of squares
};

// p = 2 min(ptilde, 1 - ptilde).
double two_sided_from_one_sided(double ptilde);

// Q^L, Q^R, Q^U, Q^C of Fisher's combination, computed in log space.
StatFamilyResult fisher_stats(std::span<const double> ptilde);

// S^L, S^R, S^U, S^C of Stouffer's combination.
StatFamilyResult stouffer_stats(std::span<const double> ptilde);

// lambda^L, lambda^R, lambda^C and Z^U from raw z scores.
GaussianStats gaussian_stats(std::span<const double> z);

// T^R of the one-sided t likelihood ratio test:
//   sum (n_j + 1) log(1 + max(T_j,0)^2 / n_j).
double t_lrt_stat(std::span<const double> t, std::span<const int> dof);

// Combined p-value for a statistic value. Chi-square scaled families with
// closed forms are exact; concordant families return the Bonferroni bracket
// [2t - t^2, 2t]; lambda^{L,R}, S^U and Z^U at odd m return hard intervals
// from the FFT null bounds (the grid spec controls that path).
PValueInterval combined_pvalue(TestMethod method, double statistic, std::size_t m,
                               const GridSpec& grid = GridSpec{});

// Throws std::invalid_argument unless every entry lies in [0,1] and m >= 1.
void validate_ptilde(std::span<const double> ptilde);

}  // namespace metacombine

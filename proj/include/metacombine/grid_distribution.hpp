#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "metacombine/types.hpp"

namespace metacombine {

// Grid configuration for the convolution engine. Defaults follow the
// reference computation (eta = 0.001, N = 100,000). With auto_range set,
// engines may extend N (then eta) so the tails of the distributions being
// bracketed fit on the grid.
struct GridSpec {
    double eta = 1e-3;
    std::size_t n = 100000;
    bool auto_range = true;
};

// A probability mass function on the uniform grid
//   {(origin_index + i) * eta : 0 <= i < size()}
// plus optional atoms at +inf and -inf. Values are immutable after
// construction and safe to share across threads.
class GridDistribution {
public:
    GridDistribution(double eta, std::int64_t origin_index, std::vector<double> mass,
                     double mass_pos_inf = 0.0, double mass_neg_inf = 0.0);

    static GridDistribution point_mass(double eta, std::int64_t index);

    double eta() const { return eta_; }
    std::int64_t origin_index() const { return origin_index_; }
    const std::vector<double>& mass() const { return mass_; }
    double mass_pos_inf() const { return mass_pos_inf_; }
    double mass_neg_inf() const { return mass_neg_inf_; }
    std::size_t size() const { return mass_.size(); }

    double grid_value(std::size_t i) const {
        return (static_cast<double>(origin_index_) + static_cast<double>(i)) * eta_;
    }

    // Total mass including the infinite atoms (compensated sum).
    double total_mass() const;

    // CDF at each grid point, including the -inf atom; prefix sums are
    // compensated so the 1e-9 slack budget is dominated by discretization,
    // not accumulation.
    std::vector<double> cdf() const;

    // Pr(X <= x) and Pr(X > x). Both sum their own side directly rather
    // than complementing, which keeps small tails accurate.
    double cdf_at(double x) const;
    double tail_at(double x) const;

private:
    double eta_;
    std::int64_t origin_index_;
    std::vector<double> mass_;
    double mass_pos_inf_;
    double mass_neg_inf_;
};

// A stochastic-dominance bracket: lower is stochastically smaller than the
// bracketed distribution (its CDF lies above), upper stochastically larger.
struct BoundPair {
    GridDistribution lower;
    GridDistribution upper;
};

enum class RoundDirection { Up, Down };

using CdfFn = std::function<double(double)>;

// Bracket a CDF supported on [0, inf) between grid distributions on
// {0, eta, ..., (n-1)eta}. The upper bound pushes inter-grid mass right
// (remainder beyond the grid to +inf); the lower bound pushes mass left
// (everything beyond the top point onto it). The cdf must be the usual
// right-continuous Pr(Y <= y), so on-grid atoms land on their own point in
// the upper bound and one step left in the lower bound.
BoundPair discretize(const CdfFn& cdf, double eta, std::size_t n);

// FFT convolution of two grid distributions sharing eta, truncated to n
// points. Up-rounding sends spilled mass to the +inf atom; down-rounding
// piles spilled mass and any +inf atom onto the top grid point. Atoms at
// infinity combine by inclusion-exclusion; origin indices add. Convolving
// a +inf atom against a -inf atom is an error, as is up-rounding anything
// carrying a -inf atom.
GridDistribution convolve_grid(const GridDistribution& f, const GridDistribution& g,
                               RoundDirection direction, std::size_t n);

// Convolve bracketing pairs: lower with lower rounded down, upper with
// upper rounded up, so the output brackets the sum distribution.
BoundPair convolve_pair(const BoundPair& a, const BoundPair& b, std::size_t n);

// Fold a sequence of summand brackets into a bracket for their sum.
BoundPair convolve_sequence(const std::vector<BoundPair>& pairs, std::size_t n);

// m-fold sum of one summand bracket via repeated squaring (O(log m)
// convolutions).
BoundPair self_convolve(const BoundPair& pair, std::uint64_t m, std::size_t n);

// Hard bracket for Pr(Q > q).
PValueInterval tail_bounds(const BoundPair& pair, double q);

// Hard bracket for the level-quantile of the bracketed distribution.
// Signals ResolutionError when the upper distribution's +inf atom makes the
// quantile unresolvable on this grid.
RealInterval quantile_bounds(const BoundPair& pair, double level);

// Bracket for max(L, R) when L and R are negatively associated: the lower
// CDF is the product of the lower CDFs, the upper CDF is
// max(0, F_L + F_R - 1) with the residual mass at +inf.
BoundPair max_combine(const BoundPair& left, const BoundPair& right);

// Debug dump: one "value,mass" row per grid point, with -inf/+inf sentinel
// rows for the atoms.
void write_csv(const GridDistribution& dist, std::ostream& os);

}  // namespace metacombine

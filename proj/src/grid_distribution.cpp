#include "metacombine/grid_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "metacombine/errors.hpp"
#include "metacombine/fft.hpp"

namespace metacombine {

namespace {

constexpr double kClampBudget = 1e-10;

class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(const std::vector<double>& v, std::size_t first, std::size_t last) {
    NeumaierSum s;
    for (std::size_t i = first; i < last; ++i) s.add(v[i]);
    return s.value();
}

// Largest index with grid_value(i) <= x, or -1 when x is below the grid.
std::ptrdiff_t last_index_at_or_below(const GridDistribution& d, double x) {
    std::ptrdiff_t lo = 0, hi = static_cast<std::ptrdiff_t>(d.size()) - 1;
    if (d.grid_value(0) > x) return -1;
    if (d.grid_value(d.size() - 1) <= x) return hi;
    while (lo + 1 < hi) {
        const std::ptrdiff_t mid = lo + (hi - lo) / 2;
        if (d.grid_value(static_cast<std::size_t>(mid)) <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

void check_same_eta(const GridDistribution& f, const GridDistribution& g) {
    if (f.eta() != g.eta())
        throw IncompatibleGridError("grid steps differ: " + std::to_string(f.eta()) +
                                    " vs " + std::to_string(g.eta()));
}

// Truncate a raw mass vector to n points per the rounding direction,
// folding atoms as the direction dictates. pos_inf is consumed for Down.
void truncate_mass(std::vector<double>& mass, RoundDirection direction, std::size_t n,
                   double& pos_inf) {
    if (mass.size() > n) {
        const double spill = compensated_sum(mass, n, mass.size());
        mass.resize(n);
        if (direction == RoundDirection::Up)
            pos_inf += spill;
        else
            mass.back() += spill;
    }
    if (direction == RoundDirection::Down && pos_inf > 0.0) {
        mass.back() += pos_inf;
        pos_inf = 0.0;
    }
}

}  // namespace

GridDistribution::GridDistribution(double eta, std::int64_t origin_index,
                                   std::vector<double> mass, double mass_pos_inf,
                                   double mass_neg_inf)
    : eta_(eta),
      origin_index_(origin_index),
      mass_(std::move(mass)),
      mass_pos_inf_(mass_pos_inf),
      mass_neg_inf_(mass_neg_inf) {
    if (!(eta_ > 0.0)) throw std::invalid_argument("grid step eta must be positive");
    if (mass_.empty()) throw std::invalid_argument("grid must hold at least one point");
    if (mass_pos_inf_ < 0.0 || mass_neg_inf_ < 0.0)
        throw std::invalid_argument("atom masses must be nonnegative");
    for (double m : mass_)
        if (!(m >= 0.0)) throw std::invalid_argument("mass entries must be nonnegative");
    const double total = total_mass();
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("mass must sum to 1, got " + std::to_string(total));
}

GridDistribution GridDistribution::point_mass(double eta, std::int64_t index) {
    return GridDistribution(eta, index, std::vector<double>{1.0});
}

double GridDistribution::total_mass() const {
    NeumaierSum s;
    for (double m : mass_) s.add(m);
    s.add(mass_pos_inf_);
    s.add(mass_neg_inf_);
    return s.value();
}

std::vector<double> GridDistribution::cdf() const {
    std::vector<double> out(mass_.size());
    NeumaierSum s;
    s.add(mass_neg_inf_);
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        s.add(mass_[i]);
        out[i] = s.value();
    }
    return out;
}

double GridDistribution::cdf_at(double x) const {
    const std::ptrdiff_t k = last_index_at_or_below(*this, x);
    NeumaierSum s;
    s.add(mass_neg_inf_);
    for (std::ptrdiff_t i = 0; i <= k; ++i) s.add(mass_[static_cast<std::size_t>(i)]);
    return s.value();
}

double GridDistribution::tail_at(double x) const {
    const std::ptrdiff_t k = last_index_at_or_below(*this, x);
    NeumaierSum s;
    s.add(mass_pos_inf_);
    for (std::size_t i = static_cast<std::size_t>(k + 1); i < mass_.size(); ++i)
        s.add(mass_[i]);
    return s.value();
}

BoundPair discretize(const CdfFn& cdf, double eta, std::size_t n) {
    if (!(eta > 0.0) || n < 1)
        throw std::invalid_argument("discretize requires eta > 0 and n >= 1");

    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = cdf(static_cast<double>(i) * eta);
        if (std::isnan(v)) throw std::invalid_argument("cdf returned NaN");
        F[i] = std::min(1.0, std::max(0.0, v));
    }

    auto diff = [](double hi, double lo) {
        const double d = hi - lo;
        if (d < 0.0) {
            if (d < -1e-12) throw std::invalid_argument("cdf is not nondecreasing");
            return 0.0;
        }
        return d;
    };

    std::vector<double> up(n);
    up[0] = F[0];
    for (std::size_t i = 1; i < n; ++i) up[i] = diff(F[i], F[i - 1]);
    const double pos_inf = std::max(0.0, 1.0 - F[n - 1]);

    std::vector<double> low(n);
    if (n == 1) {
        low[0] = 1.0;  // everything pushed onto the single point
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) low[i] = diff(F[i + 1], F[i]);
        low[0] += F[0];
        low[n - 1] = std::max(0.0, 1.0 - F[n - 1]);
    }

    return BoundPair{GridDistribution(eta, 0, std::move(low)),
                     GridDistribution(eta, 0, std::move(up), pos_inf)};
}

GridDistribution convolve_grid(const GridDistribution& f, const GridDistribution& g,
                               RoundDirection direction, std::size_t n) {
    check_same_eta(f, g);
    if (n < 1) throw std::invalid_argument("convolution target size must be >= 1");
    if ((f.mass_pos_inf() > 0.0 && g.mass_neg_inf() > 0.0) ||
        (f.mass_neg_inf() > 0.0 && g.mass_pos_inf() > 0.0))
        throw InvalidConvolutionError("cannot convolve a +inf atom with a -inf atom");
    if (direction == RoundDirection::Up &&
        (f.mass_neg_inf() > 0.0 || g.mass_neg_inf() > 0.0))
        throw InvalidConvolutionError("up-rounding is undefined with a -inf atom");

    double clamped = 0.0;
    std::vector<double> mass = convolve_mass(f.mass(), g.mass(), &clamped);
    if (clamped > kClampBudget)
        throw NumericDegradationError("FFT clamped " + std::to_string(clamped) +
                                      " of negative mass, beyond the 1e-10 budget");

    double pos_inf =
        f.mass_pos_inf() + g.mass_pos_inf() - f.mass_pos_inf() * g.mass_pos_inf();
    const double neg_inf =
        f.mass_neg_inf() + g.mass_neg_inf() - f.mass_neg_inf() * g.mass_neg_inf();

    truncate_mass(mass, direction, n, pos_inf);
    return GridDistribution(f.eta(), f.origin_index() + g.origin_index(),
                            std::move(mass), pos_inf, neg_inf);
}

BoundPair convolve_pair(const BoundPair& a, const BoundPair& b, std::size_t n) {
    return BoundPair{convolve_grid(a.lower, b.lower, RoundDirection::Down, n),
                     convolve_grid(a.upper, b.upper, RoundDirection::Up, n)};
}

namespace {

GridDistribution round_to(const GridDistribution& d, RoundDirection direction,
                          std::size_t n) {
    if (d.size() <= n) return d;
    std::vector<double> mass = d.mass();
    double pos_inf = d.mass_pos_inf();
    truncate_mass(mass, direction, n, pos_inf);
    return GridDistribution(d.eta(), d.origin_index(), std::move(mass), pos_inf,
                            d.mass_neg_inf());
}

BoundPair round_pair(const BoundPair& p, std::size_t n) {
    return BoundPair{round_to(p.lower, RoundDirection::Down, n),
                     round_to(p.upper, RoundDirection::Up, n)};
}

}  // namespace

BoundPair convolve_sequence(const std::vector<BoundPair>& pairs, std::size_t n) {
    if (pairs.empty()) throw std::invalid_argument("convolve_sequence needs m >= 1 pairs");
    BoundPair acc = round_pair(pairs.front(), n);
    for (std::size_t j = 1; j < pairs.size(); ++j)
        acc = convolve_pair(acc, pairs[j], n);
    return acc;
}

BoundPair self_convolve(const BoundPair& pair, std::uint64_t m, std::size_t n) {
    if (m < 1) throw std::invalid_argument("self_convolve needs m >= 1");
    if (m == 1) return round_pair(pair, n);

    BoundPair base = round_pair(pair, n);
    BoundPair acc = base;
    bool have_acc = false;
    // Repeated squaring over the binary decomposition of m.
    std::uint64_t rem = m;
    while (rem > 0) {
        if (rem & 1) {
            acc = have_acc ? convolve_pair(acc, base, n) : base;
            have_acc = true;
        }
        rem >>= 1;
        if (rem > 0) base = convolve_pair(base, base, n);
    }
    return acc;
}

PValueInterval tail_bounds(const BoundPair& pair, double q) {
    double lo = pair.lower.tail_at(q);
    double hi = pair.upper.tail_at(q);
    lo = std::min(1.0, std::max(0.0, lo));
    hi = std::min(1.0, std::max(0.0, hi));
    if (lo > hi) lo = hi;
    return PValueInterval{lo, hi, lo == hi};
}

RealInterval quantile_bounds(const BoundPair& pair, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("quantile level must lie in (0,1)");

    const std::vector<double> lo_cdf = pair.lower.cdf();
    const std::vector<double> up_cdf = pair.upper.cdf();

    auto first_reaching = [level](const std::vector<double>& cdf) {
        return std::lower_bound(cdf.begin(), cdf.end(), level) - cdf.begin();
    };

    const std::ptrdiff_t i_lo = first_reaching(lo_cdf);
    const std::ptrdiff_t i_hi = first_reaching(up_cdf);
    if (i_hi == static_cast<std::ptrdiff_t>(up_cdf.size()))
        throw ResolutionError(
            "upper bound's +inf atom hides the " + std::to_string(level) +
                " quantile; enlarge the grid",
            pair.upper.size() * 2);

    const double q_lo = i_lo == static_cast<std::ptrdiff_t>(lo_cdf.size())
                            ? pair.lower.grid_value(pair.lower.size() - 1)
                            : pair.lower.grid_value(static_cast<std::size_t>(i_lo));
    const double q_hi = pair.upper.grid_value(static_cast<std::size_t>(i_hi));
    return RealInterval{q_lo, q_hi};
}

BoundPair max_combine(const BoundPair& left, const BoundPair& right) {
    check_same_eta(left.lower, right.lower);
    const GridDistribution* parts[] = {&left.lower, &left.upper, &right.lower,
                                       &right.upper};
    for (const GridDistribution* d : parts) {
        if (d->origin_index() != left.lower.origin_index() ||
            d->size() != left.lower.size())
            throw IncompatibleGridError("max_combine requires identical grids");
        if (d->mass_neg_inf() > 0.0)
            throw InvalidConvolutionError("max_combine requires nonnegative support");
    }

    const std::vector<double> ll = left.lower.cdf();
    const std::vector<double> lu = left.upper.cdf();
    const std::vector<double> rl = right.lower.cdf();
    const std::vector<double> ru = right.upper.cdf();
    const std::size_t n = ll.size();

    std::vector<double> low_mass(n), up_mass(n);
    double prev_low = 0.0, prev_up = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cl = ll[i] * rl[i];
        const double cu = std::max(0.0, lu[i] + ru[i] - 1.0);
        low_mass[i] = std::max(0.0, cl - prev_low);
        up_mass[i] = std::max(0.0, cu - prev_up);
        prev_low = cl;
        prev_up = cu;
    }
    const double pos_inf = std::max(0.0, 1.0 - prev_up);

    const double eta = left.lower.eta();
    const std::int64_t origin = left.lower.origin_index();
    return BoundPair{GridDistribution(eta, origin, std::move(low_mass)),
                     GridDistribution(eta, origin, std::move(up_mass), pos_inf)};
}

void write_csv(const GridDistribution& dist, std::ostream& os) {
    char buf[64];
    os << "value,mass\n";
    std::snprintf(buf, sizeof buf, "%.17g", dist.mass_neg_inf());
    os << "-inf," << buf << "\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        char vbuf[64];
        std::snprintf(vbuf, sizeof vbuf, "%.17g", dist.grid_value(i));
        std::snprintf(buf, sizeof buf, "%.17g", dist.mass()[i]);
        os << vbuf << "," << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "%.17g", dist.mass_pos_inf());
    os << "+inf," << buf << "\n";
}

}  // namespace metacombine

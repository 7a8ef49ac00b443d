#include "fkpde/brownian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "fkpde/errors.hpp"
#include "fkpde/series.hpp"

namespace fkpde {

namespace {
constexpr int kRejectionCap = 1000000;
}

FptSample sample_fpt_symmetric(double theta, RngStream& rng) {
    if (!(theta > 0.0)) throw std::invalid_argument("sample_fpt_symmetric: theta must be > 0");
    const double unit = series::sample_fpt_unit(rng);
    const int side = rng.uniform() < 0.5 ? 1 : -1;
    return FptSample{theta * theta * unit, side, theta};
}

double sample_brownian_bridge(double t0, double x0, double t1, double x1, double s,
                              RngStream& rng) {
    if (!(t0 < s && s < t1))
        throw std::invalid_argument("sample_brownian_bridge: need t0 < s < t1");
    const double len = t1 - t0;
    const double mean = x0 + (s - t0) / len * (x1 - x0);
    const double var = (s - t0) * (t1 - s) / len;
    return mean + std::sqrt(var) * rng.normal();
}

SegmentPathSampler::SegmentPathSampler(double theta, double fpt, int side,
                                       double long_gap_threshold)
    : theta_(theta), fpt_(fpt), side_(side), long_gap_threshold_(long_gap_threshold) {
    if (!(theta > 0.0) || !(fpt > 0.0) || (side != 1 && side != -1))
        throw std::invalid_argument("SegmentPathSampler: bad first-passage data");
}

// Direct draw from the exact conditional of the confined path at time s:
// density proportional to p_kill(ba -> v over s-ta) times either the exit
// flux into the passage anchor (end gap) or p_kill(v -> bb) (interior gap).
// Inverse-cdf on a fine piecewise-linear table; used for gaps long enough
// that rejection proposals would almost always cross the far barrier.
double SegmentPathSampler::reveal_long_gap(double s, double ta, double ba, double tb, double bb,
                                           bool end_gap, RngStream& rng) const {
    const double K = 2.0 * theta_;
    constexpr int kCells = 2048;
    const double dv = K / kCells;
    std::array<double, kCells + 1> f;
    for (int i = 0; i <= kCells; ++i) {
        const double v = i * dv;
        if (i == 0 || i == kCells) {
            f[i] = 0.0;
            continue;
        }
        const double left = series::killed_kernel(ba, v, s - ta, K, true);
        const double right = end_gap ? series::killed_flux0(v, tb - s, K, true)
                                     : series::killed_kernel(v, bb, tb - s, K, true);
        f[i] = left * right;
    }
    std::array<double, kCells + 1> cum;
    cum[0] = 0.0;
    for (int i = 1; i <= kCells; ++i) cum[i] = cum[i - 1] + 0.5 * (f[i - 1] + f[i]) * dv;
    const double total = cum[kCells];
    if (!(total > 0.0)) throw internal_error("SegmentPathSampler: degenerate long-gap density");

    const double u = rng.uniform_pos() * total;
    int lo = 0, hi = kCells;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (cum[mid] < u ? lo : hi) = mid;
    }
    // Invert the trapezoid within the cell.
    const double rem = u - cum[lo];
    const double f0 = f[lo], f1 = f[lo + 1];
    double frac;
    if (std::abs(f1 - f0) < 1e-14 * (f0 + f1)) {
        frac = f0 > 0.0 ? rem / (f0 * dv) : 0.5;
    } else {
        const double slope = (f1 - f0) / dv;
        frac = (std::sqrt(f0 * f0 + 2.0 * slope * rem) - f0) / (slope * dv);
    }
    return lo * dv + std::min(std::max(frac, 0.0), 1.0) * dv;
}

double SegmentPathSampler::reveal_interior_gap(double s, double ta, double ba, double tb,
                                               double bb, RngStream& rng) const {
    const double K = 2.0 * theta_;
    const double len = tb - ta;
    const double mean = ba + (s - ta) / len * (bb - ba);
    const double sd = std::sqrt((s - ta) * (tb - s) / len);
    for (int it = 0; it < kRejectionCap; ++it) {
        const double v = mean + sd * rng.normal();
        if (!(v > 0.0) || !(v < K)) continue;
        if (!series::bernoulli_bb_inside(rng, ba, v, s - ta, 0.0, K)) continue;
        if (!series::bernoulli_bb_inside(rng, v, bb, tb - s, 0.0, K)) continue;
        return v;
    }
    throw internal_error("SegmentPathSampler: interior-gap rejection cap exceeded");
}

double SegmentPathSampler::reveal_end_gap(double s, double ta, double ba, RngStream& rng) const {
    const double K = 2.0 * theta_;
    const double len = fpt_ - ta;
    const double mean = ba * (fpt_ - s) / len;
    const double sd = std::sqrt((s - ta) * (fpt_ - s) / len);
    for (int it = 0; it < kRejectionCap; ++it) {
        const double b1 = mean + sd * rng.normal();
        const double b2 = sd * rng.normal();
        const double b3 = sd * rng.normal();
        const double v = std::sqrt(b1 * b1 + b2 * b2 + b3 * b3);
        if (!(v > 0.0) || !(v < K)) continue;
        if (!series::bernoulli_bes3_below(rng, ba, v, s - ta, K)) continue;
        if (!series::bernoulli_bes3_end_below(rng, v, fpt_ - s, K)) continue;
        return v;
    }
    std::fprintf(stderr, "endgap stall: theta=%.17g fpt=%.17g ta=%.17g ba=%.17g s=%.17g mean=%.17g sd=%.17g pbelow(ba->mean)=%.3g pend(mean)=%.3g\n",
        theta_, fpt_, ta, ba, s, mean, sd,
        series::prob_bes3_below(ba, std::max(mean,1e-12), s - ta, K),
        series::prob_bes3_end_below(std::max(mean,1e-12), fpt_ - s, K));
    throw internal_error("SegmentPathSampler: end-gap rejection cap exceeded");
}

double SegmentPathSampler::reveal(double s, RngStream& rng) {
    if (!(s > 0.0) || !(s < fpt_))
        throw std::invalid_argument("SegmentPathSampler::reveal: time outside (0, fpt)");

    auto it = std::lower_bound(points_.begin(), points_.end(), s,
                               [](const auto& p, double v) { return p.first < v; });
    if (it != points_.end() && it->first == s)
        return static_cast<double>(side_) * (theta_ - it->second);

    // Bracketing values; anchors are (0, theta) on the left and (fpt, 0)
    // on the right.
    double ta = 0.0, ba = theta_;
    if (it != points_.begin()) {
        ta = std::prev(it)->first;
        ba = std::prev(it)->second;
    }
    const bool end_gap = it == points_.end();
    const double tb = end_gap ? fpt_ : it->first;
    const double bb = end_gap ? 0.0 : it->second;
    const double K = 2.0 * theta_;
    double vb;
    if (tb - ta > long_gap_threshold_ * K * K) {
        vb = reveal_long_gap(s, ta, ba, tb, bb, end_gap, rng);
    } else if (end_gap) {
        vb = reveal_end_gap(s, ta, ba, rng);
    } else {
        vb = reveal_interior_gap(s, ta, ba, tb, bb, rng);
    }
    points_.insert(it, {s, vb});
    return static_cast<double>(side_) * (theta_ - vb);
}

double sample_terminal_below_barrier(double theta, double fpt, double t_target, int side,
                                     RngStream& rng) {
    if (!(fpt > t_target) || !(t_target > 0.0))
        throw std::invalid_argument("sample_terminal_below_barrier: need 0 < t_target < fpt");
    SegmentPathSampler sp(theta, fpt, side);
    return sp.reveal(t_target, rng);
}

double sample_interior_point(double theta, double fpt, int side, double s, RngStream& rng) {
    if (!(s > 0.0) || !(s < fpt))
        throw std::invalid_argument("sample_interior_point: need 0 < s < fpt");
    SegmentPathSampler sp(theta, fpt, side);
    return sp.reveal(s, rng);
}

}  // namespace fkpde

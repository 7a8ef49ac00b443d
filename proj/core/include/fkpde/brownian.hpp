#pragma once

#include <utility>
#include <vector>

#include "fkpde/rng.hpp"

namespace fkpde {

// First passage of standard Brownian motion out of (-theta, theta).
struct FptSample {
    double time;       // passage time
    int side;          // +1 or -1, equiprobable and independent of time
    double half_width; // theta used
};

// Exact draw via the unit-interval sampler and Brownian scaling.
FptSample sample_fpt_symmetric(double theta, RngStream& rng);

// Brownian bridge marginal: value at time s of a Brownian motion pinned to
// (t0,x0) and (t1,x1), with t0 < s < t1.
double sample_brownian_bridge(double t0, double x0, double t1, double x1, double s,
                              RngStream& rng);

// Conditional path state for one segment of one proposal dimension.
//
// Given first-passage data (exit from (-theta, theta) at time fpt on side
// +/-1, started at 0), reveals the path at arbitrary interior times, each
// draw conditioned on everything revealed before, so successive reveals are
// mutually consistent. Internally the path is handled in reversed-reflected
// coordinates B(s) = theta - side*W(s), where B is a Bessel(3) bridge from
// theta to 0 conditioned to stay below 2*theta:
//   - a reveal bracketed by two interior values is a Gaussian bridge proposal
//     accepted against the two-barrier no-exit probabilities of the sub-gaps;
//   - a reveal bracketed by the passage anchor proposes the norm of a
//     three-component Brownian bridge pinned at the origin (the exact
//     Bessel(3) bridge marginal) and corrects only for the far barrier.
// All acceptance events are decided by retrospective Bernoulli draws on the
// image series, so the revealed values carry no discretization error.
class SegmentPathSampler {
public:
    SegmentPathSampler() = default;
    // long_gap_threshold (in units of K^2 = 4 theta^2) switches a reveal
    // whose bracketing gap is longer than that to direct inverse-cdf
    // sampling of the exact killed-kernel conditional: the Bessel-bridge
    // rejection acceptance decays like exp(-pi^2 gap / 2K^2), so long rare
    // segments would stall it.
    SegmentPathSampler(double theta, double fpt, int side, double long_gap_threshold = 2.0);

    // Path displacement from the segment start at local time s in (0, fpt).
    // Strictly inside (-theta, theta).
    double reveal(double s, RngStream& rng);

    double theta() const { return theta_; }
    double fpt() const { return fpt_; }
    int side() const { return side_; }

    // Times revealed so far, sorted (excluding the anchors).
    const std::vector<std::pair<double, double>>& revealed() const { return points_; }

private:
    double reveal_interior_gap(double s, double ta, double ba, double tb, double bb,
                               RngStream& rng) const;
    double reveal_end_gap(double s, double ta, double ba, RngStream& rng) const;
    double reveal_long_gap(double s, double ta, double ba, double tb, double bb, bool end_gap,
                           RngStream& rng) const;

    double theta_ = 1.0;
    double fpt_ = 1.0;
    int side_ = 1;
    double long_gap_threshold_ = 2.0;
    std::vector<std::pair<double, double>> points_;  // (local time, B value)
};

// One-shot conveniences over a fresh SegmentPathSampler.
//
// Terminal value at t_target when the sampled passage time overshoots the
// horizon (requires 0 < t_target < fpt).
double sample_terminal_below_barrier(double theta, double fpt, double t_target, int side,
                                     RngStream& rng);

// Marginal interior value at time s in (0, fpt).
double sample_interior_point(double theta, double fpt, int side, double s, RngStream& rng);

}  // namespace fkpde

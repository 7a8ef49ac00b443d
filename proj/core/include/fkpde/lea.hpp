#pragma once

#include <cstdint>
#include <optional>

#include "fkpde/skeleton.hpp"
#include "fkpde/transform.hpp"

namespace fkpde {

struct LeaConfig {
    // 0 selects the default rule: half the shortest domain edge when
    // bounded, sqrt(horizon) in free space.
    double theta_max = 0.0;
    // Use domain-wide bounds for every segment instead of per-box bounds.
    bool global_bounds = false;
    // Fold the killing rate into the acceptance (phi + c); failures kill the
    // path instead of re-proposing the segment.
    bool combined = false;
};

struct ThetaChoice {
    Vec theta;
    std::vector<signed char> bind_lo;  // theta equals the distance to that face
    std::vector<signed char> bind_hi;
};

// theta_k = min(distance to nearer faces, sqrt(t_remaining), theta_max),
// recording which faces bind so exits land on them bit-exactly.
ThetaChoice choose_theta(const Vec& pos, const std::optional<Hyperrectangle>& domain,
                         double t_remaining, double theta_max);

// Draws per-dimension first passage data and the segment end state from the
// Brownian proposal.
SegmentProposal propose_segment(const Vec& pos, double t0, const ThetaChoice& th,
                                double t_remaining,
                                const std::optional<Hyperrectangle>& domain, RngStream& rng);

// Layered thinning acceptance: exp{A(end) - a_max} times the duration factor
// exp{-phi_lo * duration} (shifted to stay a probability when phi_lo < 0),
// times one thinning test per Poisson point at rate (phi_hi - phi_lo).
// Conditional on the proposal path this equals exp{A(end) - int phi} up to a
// proposal-independent constant, the per-segment density of the target law.
bool accept_segment(SegmentProposal& prop, const EaProblem& ea, const PhiBounds& bounds,
                    bool use_phi_tilde, double t_remaining, RngStream& rng,
                    std::uint64_t& poisson_evals);

// Full path: choose_theta / propose / accept until absorption or horizon.
// Rejected segments are re-proposed from the same start state with fresh
// randomness (combined mode instead marks the path dead).
Skeleton simulate_skeleton(const EaProblem& ea, RngStream& rng, const LeaConfig& config = {});

}  // namespace fkpde

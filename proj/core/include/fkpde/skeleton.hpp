#pragma once

#include <cstdint>
#include <vector>

#include "fkpde/brownian.hpp"
#include "fkpde/geometry.hpp"

namespace fkpde {

// One first-passage segment of the localized construction. Accepted
// proposals become skeleton segments verbatim; the per-dimension path
// samplers stay alive so later weight evaluations can keep revealing
// interior points consistently.
struct SegmentProposal {
    double t0 = 0.0;    // absolute start time
    Vec start;          // transformed coordinates
    Vec theta;          // per-dimension half-widths
    std::vector<FptSample> fpt;
    double duration = 0.0;  // min(first passage, remaining horizon)
    Vec end;
    int exit_dim = -1;  // -1 when the horizon binds first
    std::vector<SegmentPathSampler> path;
    bool absorbed = false;
    int face_dim = -1;
    int face_side = 0;

    Hyperrectangle confinement_box() const {
        Vec lo(start.size()), hi(start.size());
        for (std::size_t k = 0; k < start.size(); ++k) {
            lo[k] = start[k] - theta[k];
            hi[k] = start[k] + theta[k];
        }
        return Hyperrectangle(std::move(lo), std::move(hi));
    }

    // Reveal the full path vector at local time s in (0, duration).
    void value_at_local(double s, Vec& out, RngStream& rng) {
        for (std::size_t k = 0; k < start.size(); ++k)
            out[k] = start[k] + path[k].reveal(s, rng);
    }
};

// Exact finite representation of one path of the transformed SDE: segment
// times, positions and confinement boxes, plus the absorption outcome.
struct Skeleton {
    std::vector<SegmentProposal> segments;
    double t_hat = 0.0;
    Vec terminal;
    bool absorbed = false;
    int face_dim = -1;
    int face_side = 0;

    // Combined-mode bookkeeping (kill folded into the acceptance): a dead
    // path contributes 0; a surviving one carries the accumulated
    // normalizer weight.
    bool combined = false;
    bool died = false;
    double log_weight = 0.0;

    // Work attributable to building this skeleton.
    std::uint64_t segments_proposed = 0;
    std::uint64_t poisson_evals = 0;

    // Reveal the path at an absolute time in (0, t_hat), conditioned on
    // everything revealed so far.
    void value_at(double s_abs, Vec& out, RngStream& rng);
};

}  // namespace fkpde

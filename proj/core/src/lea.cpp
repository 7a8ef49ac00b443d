#include "fkpde/lea.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkpde/errors.hpp"

namespace fkpde {

void Skeleton::value_at(double s_abs, Vec& out, RngStream& rng) {
    if (!(s_abs > 0.0) || !(s_abs < t_hat))
        throw std::invalid_argument("skeleton: query time outside (0, t_hat)");
    // Locate the containing segment.
    std::size_t i = 0;
    while (i + 1 < segments.size() && s_abs >= segments[i].t0 + segments[i].duration) ++i;
    SegmentProposal& seg = segments[i];
    const double local = s_abs - seg.t0;
    if (local <= 0.0) {
        out = seg.start;
        return;
    }
    if (local >= seg.duration) {
        out = seg.end;
        return;
    }
    seg.value_at_local(local, out, rng);
}

ThetaChoice choose_theta(const Vec& pos, const std::optional<Hyperrectangle>& domain,
                         double t_remaining, double theta_max) {
    if (!(t_remaining > 0.0)) throw std::invalid_argument("choose_theta: no time remaining");
    if (!(theta_max > 0.0)) throw std::invalid_argument("choose_theta: theta_max must be > 0");
    const std::size_t d = pos.size();
    ThetaChoice out;
    out.theta.resize(d);
    out.bind_lo.assign(d, 0);
    out.bind_hi.assign(d, 0);
    const double cap = std::min(std::sqrt(t_remaining), theta_max);
    for (std::size_t k = 0; k < d; ++k) {
        double th = cap;
        if (domain) {
            const double dlo = pos[k] - domain->lo[k];
            const double dhi = domain->hi[k] - pos[k];
            if (!(dlo > 0.0) || !(dhi > 0.0))
                throw std::invalid_argument("choose_theta: position not strictly inside domain");
            th = std::min(th, std::min(dlo, dhi));
            out.bind_lo[k] = th == dlo;
            out.bind_hi[k] = th == dhi;
        }
        out.theta[k] = th;
    }
    return out;
}

SegmentProposal propose_segment(const Vec& pos, double t0, const ThetaChoice& th,
                                double t_remaining,
                                const std::optional<Hyperrectangle>& domain, RngStream& rng) {
    const std::size_t d = pos.size();
    SegmentProposal prop;
    prop.t0 = t0;
    prop.start = pos;
    prop.theta = th.theta;
    prop.fpt.reserve(d);
    for (std::size_t k = 0; k < d; ++k) prop.fpt.push_back(sample_fpt_symmetric(th.theta[k], rng));

    double min_time = prop.fpt[0].time;
    std::size_t exit_k = 0;
    for (std::size_t k = 1; k < d; ++k) {
        if (prop.fpt[k].time < min_time) {
            min_time = prop.fpt[k].time;
            exit_k = k;
        }
    }
    const bool horizon_binds = min_time >= t_remaining;
    prop.duration = horizon_binds ? t_remaining : min_time;
    prop.exit_dim = horizon_binds ? -1 : static_cast<int>(exit_k);

    prop.path.reserve(d);
    for (std::size_t k = 0; k < d; ++k)
        prop.path.emplace_back(th.theta[k], prop.fpt[k].time, prop.fpt[k].side);

    prop.end.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        // Ties (another dimension passing exactly at the segment end) land on
        // the barrier too; only the designated exit dimension can absorb.
        if (prop.fpt[k].time <= prop.duration) {
            const int side = prop.fpt[k].side;
            if (static_cast<int>(k) == prop.exit_dim && domain) {
                if (side < 0 && th.bind_lo[k]) {
                    prop.end[k] = domain->lo[k];  // bit-exact face assignment
                    prop.absorbed = true;
                    prop.face_dim = static_cast<int>(k);
                    prop.face_side = -1;
                    continue;
                }
                if (side > 0 && th.bind_hi[k]) {
                    prop.end[k] = domain->hi[k];
                    prop.absorbed = true;
                    prop.face_dim = static_cast<int>(k);
                    prop.face_side = +1;
                    continue;
                }
            }
            prop.end[k] = pos[k] + side * th.theta[k];
        } else {
            prop.end[k] = pos[k] + prop.path[k].reveal(prop.duration, rng);
        }
    }
    return prop;
}

bool accept_segment(SegmentProposal& prop, const EaProblem& ea, const PhiBounds& bounds,
                    bool use_phi_tilde, double t_remaining, RngStream& rng,
                    std::uint64_t& poisson_evals) {
    const UnitVolatilitySde& sde = ea.sde;
    double phi_lo = bounds.phi_lo;
    double phi_hi = bounds.phi_hi;
    if (use_phi_tilde) {
        phi_lo += ea.problem.kill_lo;
        phi_hi += ea.problem.kill_hi;
    }
    const double tol = 1e-9 * (1.0 + std::abs(phi_hi));
    if (phi_hi < phi_lo - tol) throw bound_violation("accept_segment: phi_hi < phi_lo");
    const double rate = std::max(phi_hi - phi_lo, 0.0);

    const double t_end = prop.t0 + prop.duration;
    const double a_end = sde.potential(prop.end, t_end);
    double log_p = a_end - bounds.a_max - phi_lo * prop.duration;
    if (phi_lo < 0.0) log_p += phi_lo * t_remaining;  // keep the factor a probability
    if (log_p > 1e-9) throw bound_violation("accept_segment: potential bound violated");
    if (!(std::log(rng.uniform_pos()) < log_p)) return false;

    if (rate > 0.0) {
        Vec y(prop.start.size());
        double s = rng.exponential(rate);
        while (s < prop.duration) {
            prop.value_at_local(s, y, rng);
            ++poisson_evals;
            const double abs_time = prop.t0 + s;
            const double val = use_phi_tilde ? phi_tilde(sde, ea.problem, y, abs_time)
                                             : sde.phase(y, abs_time);
            if (val < phi_lo - tol || val > phi_hi + tol)
                throw bound_violation("accept_segment: phi left its declared box bounds");
            if (!(rng.uniform() < (phi_hi - val) / rate)) return false;
            s += rng.exponential(rate);
        }
    }
    return true;
}

Skeleton simulate_skeleton(const EaProblem& ea, RngStream& rng, const LeaConfig& config) {
    const UnitVolatilitySde& sde = ea.sde;
    const double horizon = sde.horizon;
    double theta_max = config.theta_max;
    if (theta_max <= 0.0)
        theta_max = sde.domain ? 0.5 * sde.domain->shortest_edge() : std::sqrt(horizon);

    BoundOracle bounds = ea.bounds;
    bounds.prefer_global(config.global_bounds && bounds.has_global());

    Skeleton sk;
    sk.combined = config.combined;
    Vec pos = sde.start;
    double t0 = 0.0;

    while (true) {
        const double t_rem = horizon - t0;
        if (!(t_rem > 0.0)) {  // fp underflow of the remaining time
            sk.t_hat = horizon;
            sk.terminal = pos;
            return sk;
        }
        const ThetaChoice th = choose_theta(pos, sde.domain, t_rem, theta_max);

        // The confinement box and time span are fixed before any draw, so the
        // bounds stay constant across the rejection loop; a duration-dependent
        // bound would tilt the accepted law.
        Hyperrectangle box;
        {
            Vec blo(pos.size()), bhi(pos.size());
            for (std::size_t k = 0; k < pos.size(); ++k) {
                blo[k] = pos[k] - th.theta[k];
                bhi[k] = pos[k] + th.theta[k];
            }
            box = Hyperrectangle(std::move(blo), std::move(bhi));
        }
        const PhiBounds pb = bounds.get(box, t0, t0 + t_rem);

        SegmentProposal prop;
        while (true) {
            ++sk.segments_proposed;
            prop = propose_segment(pos, t0, th, t_rem, sde.domain, rng);
            if (accept_segment(prop, ea, pb, config.combined, t_rem, rng, sk.poisson_evals))
                break;
            if (config.combined) {  // a failed test is a killed path, not a retry
                sk.died = true;
                sk.t_hat = t0 + prop.duration;
                sk.terminal = prop.end;
                return sk;
            }
        }

        if (config.combined) {
            const double phi_lo = pb.phi_lo + ea.problem.kill_lo;
            sk.log_weight += pb.a_max - sde.potential(pos, t0);
            if (phi_lo < 0.0) sk.log_weight -= phi_lo * t_rem;
        }

        pos = prop.end;
        const bool absorbed = prop.absorbed;
        const bool horizon_reached = prop.exit_dim < 0;
        const double t_next = horizon_reached ? horizon : t0 + prop.duration;
        sk.segments.push_back(std::move(prop));
        t0 = t_next;
        if (absorbed || horizon_reached) {
            sk.t_hat = t0;
            sk.terminal = pos;
            sk.absorbed = absorbed;
            if (absorbed) {
                sk.face_dim = sk.segments.back().face_dim;
                sk.face_side = sk.segments.back().face_side;
            }
            return sk;
        }
    }
}

}  // namespace fkpde

#include "fkpde/estimator.hpp"

#include <chrono>
#include <cmath>

#include "fkpde/parallel.hpp"

namespace fkpde {

double kappa_value(const PdeProblem& problem, const Vec& x_original, bool absorbed, int face_dim,
                   int face_side, double t_pde) {
    if (!absorbed) return problem.initial(x_original, 0.0);
    Vec x = x_original;
    // Pin the exit coordinate to the face in original coordinates; the
    // inverse transform can leave rounding noise on it.
    x[face_dim] = face_side < 0 ? problem.dirichlet->domain.lo[face_dim]
                                : problem.dirichlet->domain.hi[face_dim];
    return problem.dirichlet->g(face_dim, face_side, x, t_pde);
}

PathFunctionalSample path_functional(Skeleton& skeleton, const EaProblem& ea, RngStream& rng) {
    PathFunctionalSample out;
    out.t_hat = skeleton.t_hat;
    out.work = skeleton.segments_proposed + skeleton.poisson_evals;
    if (skeleton.died) {
        out.value = 0.0;
        return out;
    }

    const PdeProblem& pb = ea.problem;
    const UnitVolatilitySde& sde = ea.sde;
    const double horizon = sde.horizon;

    const Vec x_term = sde.to_original(skeleton.terminal);
    const double kappa = kappa_value(pb, x_term, skeleton.absorbed, skeleton.face_dim,
                                     skeleton.face_side, horizon - skeleton.t_hat);

    if (skeleton.combined) {  // kill already inside the acceptance
        out.value = kappa * std::exp(skeleton.log_weight);
        return out;
    }

    double weight = std::exp(-pb.kill_lo * skeleton.t_hat);
    const double rate = pb.kill_hi - pb.kill_lo;
    if (rate > 0.0) {
        Vec y(static_cast<std::size_t>(sde.dim));
        double r = rng.exponential(rate);
        while (r < skeleton.t_hat) {
            skeleton.value_at(r, y, rng);
            const double c = pb.kill_checked(sde.to_original(y), horizon - r);
            weight *= (pb.kill_hi - c) / rate;
            ++out.poisson_count;
            r += rng.exponential(rate);
        }
        out.work += out.poisson_count;
    }
    out.value = kappa * weight;
    return out;
}

namespace {

EstimatorResult finish(const ReplicateStats& st, double z, double wall_s) {
    EstimatorResult r;
    r.mean = st.mean;
    r.sd = st.sd;
    r.n = st.n;
    r.ci_defined = st.n >= 2;
    r.ci_half = r.ci_defined ? z * st.sd / std::sqrt(static_cast<double>(st.n)) : 0.0;
    r.work = st.work_total;
    r.work_max = st.work_max;
    r.work_median = st.work_median;
    r.wall_s = wall_s;
    return r;
}

}  // namespace

EstimatorResult estimate_ea(const EaProblem& ea, std::size_t n, std::uint64_t seed,
                            const EaConfig& config) {
    LeaConfig lea = config.lea;
    lea.combined = config.mode == EaMode::combined;
    RngStream root(seed, 0);
    const auto t0 = std::chrono::steady_clock::now();
    ReplicateStats st = run_replicates(n, config.threads, [&](std::size_t i) {
        RngStream rng = root.child(i);
        Skeleton sk = simulate_skeleton(ea, rng, lea);
        PathFunctionalSample ps = path_functional(sk, ea, rng);
        return ReplicateOutcome{ps.value, ps.work};
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(st, config.ci_level_z, wall);
}

EstimatorResult estimate_ea(const PdeProblem& problem, const Vec& x, double t, std::size_t n,
                            std::uint64_t seed, const EaConfig& config) {
    const EaProblem ea = make_ea(problem, x, t);
    return estimate_ea(ea, n, seed, config);
}

}  // namespace fkpde

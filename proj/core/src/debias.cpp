#include "fkpde/debias.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fkpde/errors.hpp"
#include "fkpde/euler.hpp"
#include "fkpde/parallel.hpp"

namespace fkpde {

HaltingDistribution HaltingDistribution::geometric(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("halting: geometric parameter must be in (0,1)");
    return {Kind::geometric, p};
}

HaltingDistribution HaltingDistribution::power(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("halting: power exponent must be > 0");
    return {Kind::power, r};
}

double HaltingDistribution::prob_ge(int j) const {
    if (j <= 0) return 1.0;
    switch (kind) {
        case Kind::geometric:
            return std::pow(1.0 - param, j);
        case Kind::power:
            return std::exp2(-static_cast<double>(j) * param);
    }
    return 0.0;
}

int HaltingDistribution::sample(RngStream& rng) const {
    const double u = rng.uniform_pos();
    switch (kind) {
        case Kind::geometric:
            return static_cast<int>(std::floor(std::log(u) / std::log(1.0 - param)));
        case Kind::power:
            return static_cast<int>(std::floor(-std::log2(u) / param));
    }
    return 0;
}

bool HaltingDistribution::work_divergent() const {
    switch (kind) {
        case Kind::geometric:
            return 2.0 * (1.0 - param) >= 1.0;
        case Kind::power:
            return param <= 1.0;
    }
    return false;
}

bool HaltingDistribution::variance_divergent(double strong_order) const {
    switch (kind) {
        case Kind::geometric:
            return std::exp2(-2.0 * strong_order) >= 1.0 - param;
        case Kind::power:
            return param >= 2.0 * strong_order;
    }
    return false;
}

ExpectedWork expected_work(const HaltingDistribution& halting, int j_max) {
    ExpectedWork out;
    out.divergent = halting.work_divergent();
    for (int j = 0; j <= j_max; ++j)
        out.partial_sum += std::exp2(static_cast<double>(j)) * halting.prob_ge(j);
    return out;
}

namespace {

constexpr int kMaxHalt = 30;  // fine grid beyond 2^30 steps is refused

// Per-level Euler state for the one-pass cascade.
struct Level {
    Vec pos;
    double kill_sum = 0.0;
    bool exited = false;
    int face_dim = -1, face_side = 0;
    std::int64_t steps_done = 0;
    Vec half;  // pending first child of the next coarser increment
};

struct Cascade {
    const PdeProblem& pb;
    double t;
    int top;  // finest level index H
    std::vector<Level> levels;
    Vec drift_buf;
    std::uint64_t work = 0;

    Cascade(const PdeProblem& problem, const Vec& x, double horizon, int halt)
        : pb(problem), t(horizon), top(halt) {
        levels.resize(halt + 1);
        for (auto& lv : levels) {
            lv.pos = x;
            lv.half.assign(x.size(), 0.0);
        }
        drift_buf.resize(x.size());
    }

    bool all_exited() const {
        for (const auto& lv : levels)
            if (!lv.exited) return false;
        return true;
    }

    // Advance level j by one step with Brownian increment dw, then carry the
    // completed increment upward: a coarse increment is formed by exactly one
    // addition of its two children.
    void advance(int j, const Vec& dw) {
        Level& lv = levels[j];
        const double h = t / std::exp2(static_cast<double>(j));
        if (!lv.exited) {
            const double t_pde = t - static_cast<double>(lv.steps_done) * h;
            lv.kill_sum += pb.kill_checked(lv.pos, t_pde);
            pb.drift.eval(lv.pos, t_pde, drift_buf);
            const int d = static_cast<int>(lv.pos.size());
            for (int k = 0; k < d; ++k) {
                double noise = dw[k];
                switch (pb.diffusion.kind) {
                    case DiffusionField::Kind::diag_const:
                        noise *= pb.diffusion.diag[k];
                        break;
                    case DiffusionField::Kind::scalar_fn:
                        noise *= pb.diffusion.sigma1d(lv.pos[0], t_pde);
                        break;
                    case DiffusionField::Kind::matrix_fn:
                        throw unsupported_problem("debias: diagonal diffusion required");
                }
                lv.pos[k] += drift_buf[k] * h + noise;
            }
            if (pb.dirichlet) mark_exit(lv);
            ++work;
        }
        ++lv.steps_done;
        if (j == 0) return;
        if (lv.steps_done % 2 == 1) {
            lv.half = dw;
        } else {
            Vec sum(dw.size());
            for (std::size_t k = 0; k < dw.size(); ++k) sum[k] = lv.half[k] + dw[k];
            advance(j - 1, sum);
        }
    }

    void mark_exit(Level& lv) const {
        const auto& dom = pb.dirichlet->domain;
        double worst = -1.0;
        for (std::size_t k = 0; k < lv.pos.size(); ++k) {
            const double v = std::max(dom.lo[k] - lv.pos[k], lv.pos[k] - dom.hi[k]);
            if (v >= 0.0 && v > worst) {
                worst = v;
                lv.face_dim = static_cast<int>(k);
                lv.face_side = lv.pos[k] <= dom.lo[k] ? -1 : +1;
                lv.exited = true;
            }
        }
    }

    double level_value(int j) const {
        const Level& lv = levels[j];
        const double h = t / std::exp2(static_cast<double>(j));
        const double discount = std::exp(-h * lv.kill_sum);
        if (lv.exited) {
            const Vec xb = pb.dirichlet->domain.clamp(lv.pos);
            return pb.dirichlet->g(lv.face_dim, lv.face_side, xb, 0.0) * discount;
        }
        return pb.initial(lv.pos, 0.0) * discount;
    }
};

}  // namespace

LadderDraw sample_ladder(const PdeProblem& problem, const Vec& x, double t,
                         const HaltingDistribution& halting, RngStream& rng,
                         CouplingMode coupling) {
    problem.validate();
    LadderDraw out;
    out.halt = halting.sample(rng);
    if (out.halt > kMaxHalt)
        throw resource_limit("debias: halting draw H = " + std::to_string(out.halt) +
                             " implies a fine grid beyond 2^30 steps (P(H >= j) = " +
                             std::to_string(halting.prob_ge(out.halt)) + ")");

    const int H = out.halt;
    const int d = problem.dim;
    const std::int64_t fine_steps = std::int64_t{1} << H;
    const double h_fine = t / static_cast<double>(fine_steps);
    const double sqrt_h = std::sqrt(h_fine);

    Cascade cas(problem, x, t, H);
    Vec dw(d);

    if (coupling == CouplingMode::aggregate_fine) {
        for (std::int64_t m = 0; m < fine_steps && !cas.all_exited(); ++m) {
            for (int k = 0; k < d; ++k) dw[k] = sqrt_h * rng.normal();
            cas.advance(H, dw);
        }
    } else {
        if (H > 24) throw resource_limit("debias: bridge refinement capped at H = 24");
        // Coarse-first refinement: split each increment in two with a bridge
        // midpoint, then drive the cascade with the finest array.
        std::vector<double> incr(static_cast<std::size_t>(fine_steps) * d);
        for (int k = 0; k < d; ++k) incr[k] = std::sqrt(t) * rng.normal();
        std::int64_t cur = 1;
        double dur = t;
        std::vector<double> nxt;
        for (int j = 0; j < H; ++j) {
            nxt.assign(static_cast<std::size_t>(cur) * 2 * d, 0.0);
            for (std::int64_t m = 0; m < cur; ++m) {
                for (int k = 0; k < d; ++k) {
                    const double whole = incr[static_cast<std::size_t>(m) * d + k];
                    const double left = 0.5 * whole + 0.5 * std::sqrt(dur) * rng.normal();
                    nxt[static_cast<std::size_t>(2 * m) * d + k] = left;
                    nxt[static_cast<std::size_t>(2 * m + 1) * d + k] = whole - left;
                }
            }
            incr.swap(nxt);
            cur *= 2;
            dur *= 0.5;
        }
        for (std::int64_t m = 0; m < fine_steps && !cas.all_exited(); ++m) {
            for (int k = 0; k < d; ++k) dw[k] = incr[static_cast<std::size_t>(m) * d + k];
            cas.advance(H, dw);
        }
    }

    // Finish every level that has unexecuted steps (exited levels keep their
    // stopped value; the others must run to the horizon, which only happens
    // when the loop broke early because all levels exited).
    out.level_values.resize(H + 1);
    for (int j = 0; j <= H; ++j) out.level_values[j] = cas.level_value(j);
    out.work = cas.work;

    out.deltas.resize(H + 1);
    out.weights.resize(H + 1);
    out.value = 0.0;
    for (int j = 0; j <= H; ++j) {
        out.deltas[j] = j == 0 ? out.level_values[0]
                               : out.level_values[j] - out.level_values[j - 1];
        out.weights[j] = 1.0 / halting.prob_ge(j);
        out.value += out.weights[j] * out.deltas[j];
    }
    return out;
}

EstimatorResult estimate_debiased(const PdeProblem& problem, const Vec& x, double t,
                                  std::size_t n_draws, std::uint64_t seed,
                                  const DebiasConfig& config) {
    RngStream root(seed, 2);
    const auto t0 = std::chrono::steady_clock::now();
    ReplicateStats st = run_replicates(n_draws, config.threads, [&](std::size_t i) {
        RngStream rng = root.child(i);
        LadderDraw draw = sample_ladder(problem, x, t, config.halting, rng, config.coupling);
        return ReplicateOutcome{draw.value, draw.work};
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EstimatorResult r;
    r.mean = st.mean;
    r.sd = st.sd;
    r.n = st.n;
    r.ci_defined = st.n >= 2;
    r.ci_half =
        r.ci_defined ? config.ci_level_z * st.sd / std::sqrt(static_cast<double>(st.n)) : 0.0;
    r.work = st.work_total;
    r.work_max = st.work_max;
    r.work_median = st.work_median;
    r.wall_s = wall;
    return r;
}

}  // namespace fkpde

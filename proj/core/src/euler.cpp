#include "fkpde/euler.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fkpde/errors.hpp"
#include "fkpde/parallel.hpp"

namespace fkpde {

namespace {

// Dense Cholesky for the full-matrix diffusion case (small d).
void cholesky(std::vector<double>& a, int d) {
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * d + j];
            for (int k = 0; k < j; ++k) s -= a[i * d + k] * a[j * d + k];
            if (i == j) {
                if (!(s > 0.0)) throw bound_violation("euler: diffusion matrix not SPD");
                a[i * d + i] = std::sqrt(s);
            } else {
                a[i * d + j] = s / a[j * d + j];
            }
        }
        for (int j = i + 1; j < d; ++j) a[i * d + j] = 0.0;
    }
}

// Shared stepping state: positions, killing sum, exit bookkeeping.
struct EulerWalk {
    const PdeProblem& pb;
    double t;
    Vec pos;
    double kill_sum = 0.0;  // sum of c at visited grid points
    double kill_first = 0.0;
    bool have_kill = false;
    bool exited = false;
    int face_dim = -1, face_side = 0;
    EulerInterp interp = EulerInterp::piecewise_constant;

    Vec drift_buf, noise_buf;
    std::vector<double> a_buf;

    EulerWalk(const PdeProblem& problem, const Vec& x, double horizon,
              EulerInterp ip = EulerInterp::piecewise_constant)
        : pb(problem), t(horizon), pos(x), interp(ip) {
        drift_buf.resize(x.size());
        noise_buf.resize(x.size());
        if (pb.diffusion.kind == DiffusionField::Kind::matrix_fn)
            a_buf.resize(x.size() * x.size());
    }

    // One step of size h from PDE time t_pde; accumulates c first so the
    // killing sum is truncated at the exit index.
    void step(double h, double t_pde, RngStream& rng) {
        const int d = static_cast<int>(pos.size());
        const double sh = std::sqrt(h);
        for (int k = 0; k < d; ++k) noise_buf[k] = sh * rng.normal();
        step_with_increment(h, t_pde, noise_buf.data());
    }

    // Step with an externally supplied Brownian increment. The update is a
    // single fused `pos += drift*h + sigma*dw` so coupled evaluations are
    // bit-reproducible regardless of who supplies the increments.
    void step_with_increment(double h, double t_pde, const double* dw) {
        const int d = static_cast<int>(pos.size());
        {
            const double c = pb.kill_checked(pos, t_pde);
            if (!have_kill) {
                kill_first = c;
                have_kill = true;
            }
            kill_sum += c;
        }
        pb.drift.eval(pos, t_pde, drift_buf);
        switch (pb.diffusion.kind) {
            case DiffusionField::Kind::diag_const:
                for (int k = 0; k < d; ++k)
                    pos[k] += drift_buf[k] * h + pb.diffusion.diag[k] * dw[k];
                break;
            case DiffusionField::Kind::scalar_fn: {
                const double sg = pb.diffusion.sigma1d(pos[0], t_pde);
                pos[0] += drift_buf[0] * h + sg * dw[0];
                break;
            }
            case DiffusionField::Kind::matrix_fn: {
                pb.diffusion.a_fn(pos, t_pde, a_buf);
                cholesky(a_buf, d);
                for (int i = d - 1; i >= 0; --i) {
                    double s = 0.0;
                    for (int j = 0; j <= i; ++j) s += a_buf[i * d + j] * dw[j];
                    pos[i] += drift_buf[i] * h + s;
                }
                break;
            }
        }
        check_exit();
    }

    // Killing integral: left-endpoint grid sum by default; the linear
    // interpolation option replaces it with the trapezoid over the same grid
    // values plus the stopped endpoint.
    double value(double h, double t_pde_end) const {
        double ksum = kill_sum;
        if (interp == EulerInterp::linear && have_kill) {
            const Vec xe = exited && pb.dirichlet ? pb.dirichlet->domain.clamp(pos) : pos;
            ksum += 0.5 * (pb.kill_checked(xe, t_pde_end) - kill_first);
        }
        const double discount = std::exp(-h * ksum);
        if (exited) {
            const Vec xb = pb.dirichlet->domain.clamp(pos);
            return pb.dirichlet->g(face_dim, face_side, xb, 0.0) * discount;
        }
        return pb.initial(pos, 0.0) * discount;
    }

private:
    void check_exit() {
        if (exited || !pb.dirichlet) return;
        const auto& dom = pb.dirichlet->domain;
        double worst = 0.0;
        for (std::size_t k = 0; k < pos.size(); ++k) {
            const double under = dom.lo[k] - pos[k];
            const double over = pos[k] - dom.hi[k];
            if (under > worst) {
                worst = under;
                face_dim = static_cast<int>(k);
                face_side = -1;
            }
            if (over > worst) {
                worst = over;
                face_dim = static_cast<int>(k);
                face_side = +1;
            }
            // Landing exactly on a face counts as an exit too.
            if (!exited && (pos[k] <= dom.lo[k] || pos[k] >= dom.hi[k])) exited = true;
        }
        if (exited && face_dim < 0) {
            for (std::size_t k = 0; k < pos.size(); ++k) {
                if (pos[k] <= dom.lo[k]) {
                    face_dim = static_cast<int>(k);
                    face_side = -1;
                } else if (pos[k] >= dom.hi[k]) {
                    face_dim = static_cast<int>(k);
                    face_side = +1;
                }
            }
        }
    }
};

}  // namespace

double euler_path_value(const PdeProblem& problem, const Vec& x, double t, std::int64_t steps,
                        RngStream& rng, std::uint64_t& steps_done, EulerInterp interp) {
    if (steps < 1) throw std::invalid_argument("euler: need at least one step");
    const double h = t / static_cast<double>(steps);
    EulerWalk w(problem, x, t, interp);
    std::int64_t m = 0;
    for (; m < steps && !w.exited; ++m) {
        w.step(h, t - static_cast<double>(m) * h, rng);
        ++steps_done;
    }
    return w.value(h, t - static_cast<double>(m) * h);
}

double euler_functional(const PdeProblem& problem, const Vec& x, double t, int level,
                        int fine_level, std::span<const double> fine_increments,
                        std::uint64_t& steps_done) {
    if (level < 0 || level > fine_level) throw std::invalid_argument("euler_functional: level");
    const int d = problem.dim;
    const std::int64_t fine_steps = std::int64_t{1} << fine_level;
    if (fine_increments.size() != static_cast<std::size_t>(fine_steps * d))
        throw std::invalid_argument("euler_functional: increment array size");

    const std::int64_t block = std::int64_t{1} << (fine_level - level);
    const std::int64_t steps = std::int64_t{1} << level;
    const double h = t / static_cast<double>(steps);

    // Dyadic pairwise block sum, matching the production carry tree.
    std::vector<double> incr(d);
    auto block_sum = [&](auto&& self, std::int64_t begin, std::int64_t len, int k) -> double {
        if (len == 1) return fine_increments[static_cast<std::size_t>(begin * d + k)];
        const std::int64_t half = len / 2;
        return self(self, begin, half, k) + self(self, begin + half, half, k);
    };

    EulerWalk w(problem, x, t);
    std::int64_t m = 0;
    for (; m < steps && !w.exited; ++m) {
        for (int k = 0; k < d; ++k) incr[k] = block_sum(block_sum, m * block, block, k);
        w.step_with_increment(h, t - static_cast<double>(m) * h, incr.data());
        ++steps_done;
    }
    return w.value(h, t - static_cast<double>(m) * h);
}

StoppedStats euler_stopped_stats(const PdeProblem& problem, const Vec& x, double t,
                                 std::int64_t steps, std::size_t n, std::uint64_t seed,
                                 int threads) {
    problem.validate();
    const int d = problem.dim;
    const double h = t / static_cast<double>(steps);
    RngStream root(seed, 1);

    struct Acc {
        double absorb = 0.0, absorb2 = 0.0;
        std::vector<double> pos, pos2;
        double kap = 0.0, kap2 = 0.0;
    };
    constexpr std::size_t kChunk = 1024;
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<Acc> acc(n_chunks);
    for (auto& a : acc) {
        a.pos.assign(d, 0.0);
        a.pos2.assign(d, 0.0);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            Acc a;
            a.pos.assign(d, 0.0);
            a.pos2.assign(d, 0.0);
            const std::size_t b = c * kChunk, e = std::min(n, b + kChunk);
            for (std::size_t i = b; i < e; ++i) {
                RngStream rng = root.child(i);
                EulerWalk w(problem, x, t);
                for (std::int64_t m = 0; m < steps && !w.exited; ++m)
                    w.step(h, t - static_cast<double>(m) * h, rng);
                const Vec xs = problem.dirichlet && w.exited
                                   ? problem.dirichlet->domain.clamp(w.pos)
                                   : w.pos;
                const double ab = w.exited ? 1.0 : 0.0;
                double kap;
                if (w.exited)
                    kap = problem.dirichlet->g(w.face_dim, w.face_side, xs, 0.0);
                else
                    kap = problem.initial(xs, 0.0);
                a.absorb += ab;
                a.absorb2 += ab;
                a.kap += kap;
                a.kap2 += kap * kap;
                for (int k = 0; k < d; ++k) {
                    a.pos[k] += xs[k];
                    a.pos2[k] += xs[k] * xs[k];
                }
            }
            acc[c] = std::move(a);
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n_chunks)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    Acc tot;
    tot.pos.assign(d, 0.0);
    tot.pos2.assign(d, 0.0);
    for (const auto& a : acc) {
        tot.absorb += a.absorb;
        tot.absorb2 += a.absorb2;
        tot.kap += a.kap;
        tot.kap2 += a.kap2;
        for (int k = 0; k < d; ++k) {
            tot.pos[k] += a.pos[k];
            tot.pos2[k] += a.pos2[k];
        }
    }
    const double dn = static_cast<double>(n);
    auto finish = [&](double s, double s2, double& mean, double& se) {
        mean = s / dn;
        const double var = std::max(0.0, (s2 - s * s / dn) / (dn - 1.0));
        se = std::sqrt(var / dn);
    };
    StoppedStats out;
    out.n = n;
    finish(tot.absorb, tot.absorb2, out.absorb_mean, out.absorb_se);
    finish(tot.kap, tot.kap2, out.kappa_mean, out.kappa_se);
    out.position_mean.resize(d);
    out.position_se.resize(d);
    for (int k = 0; k < d; ++k)
        finish(tot.pos[k], tot.pos2[k], out.position_mean[k], out.position_se[k]);
    return out;
}

EstimatorResult euler_estimate(const PdeProblem& problem, const Vec& x, double t,
                               std::int64_t steps, std::size_t n, std::uint64_t seed, int threads,
                               double ci_level_z, EulerInterp interp) {
    problem.validate();
    RngStream root(seed, 1);
    const auto t0 = std::chrono::steady_clock::now();
    ReplicateStats st = run_replicates(n, threads, [&](std::size_t i) {
        RngStream rng = root.child(i);
        std::uint64_t work = 0;
        const double v = euler_path_value(problem, x, t, steps, rng, work, interp);
        return ReplicateOutcome{v, work};
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EstimatorResult r;
    r.mean = st.mean;
    r.sd = st.sd;
    r.n = st.n;
    r.ci_defined = st.n >= 2;
    r.ci_half = r.ci_defined ? ci_level_z * st.sd / std::sqrt(static_cast<double>(st.n)) : 0.0;
    r.work = st.work_total;
    r.work_max = st.work_max;
    r.work_median = st.work_median;
    r.wall_s = wall;
    return r;
}

}  // namespace fkpde

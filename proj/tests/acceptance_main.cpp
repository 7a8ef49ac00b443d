// Acceptance suite: runs every gate criterion at its pinned scale and prints
// one pass/fail line per criterion. Exit status is the number of failures.
//
// This is a long-running binary (tens of minutes on one core at the default
// scales). --only N runs a single criterion; --seed and --threads are
// honored everywhere.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "fkpde/bench.hpp"
#include "fkpde/builtin.hpp"
#include "fkpde/debias.hpp"
#include "fkpde/estimator.hpp"
#include "fkpde/euler.hpp"
#include "fkpde/lea.hpp"
#include "fkpde/series.hpp"
#include "fkpde/transform.hpp"

using namespace fkpde;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? " ok" : " FAILED");
    }
};

std::uint64_t g_seed = 1;
int g_threads = 1;

double se_of(const EstimatorResult& r) { return r.sd / std::sqrt(static_cast<double>(r.n)); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

// ---- criterion 1: Table 1 reproduction, exact algorithm ----
Outcome criterion1() {
    Outcome out;
    const double truths[] = {56.13, 19.03, 5.223, 1.833};
    const double drifts[] = {0.1, 0.2, 0.3, 0.4};
    for (int i = 0; i < 4; ++i) {
        const PdeProblem pb = make_adv_diff_1d(0.01, drifts[i]);
        EaConfig cfg;
        cfg.threads = g_threads;
        const EstimatorResult r = estimate_ea(pb, {0.9}, 5.0, 1000000, g_seed, cfg);
        const bool ok = std::abs(r.mean - truths[i]) <= r.ci_half;
        out.require(ok, fmt("b=%.1f", drifts[i]) +
                            fmt(": %.4f +- %.4f vs %.5g", r.mean, r.ci_half, truths[i]) +
                            fmt(" (wall %.1fs)", r.wall_s));
    }
    return out;
}

// ---- criterion 2: Table 1 reproduction, debiasing ----
Outcome criterion2() {
    Outcome out;
    const double truths[] = {56.13, 19.03, 5.223, 1.833};
    const double drifts[] = {0.1, 0.2, 0.3, 0.4};
    for (int i = 0; i < 4; ++i) {
        const PdeProblem pb = make_adv_diff_1d(0.01, drifts[i]);
        DebiasConfig dc;
        dc.threads = g_threads;
        const EstimatorResult r = estimate_debiased(pb, {0.9}, 5.0, 100000, g_seed, dc);
        const bool contains = std::abs(r.mean - truths[i]) <= r.ci_half;
        out.require(contains, fmt("b=%.1f", drifts[i]) +
                                  fmt(": %.3f +- %.3f vs %.5g", r.mean, r.ci_half, truths[i]));
        // Matched wall time: give the exact algorithm the debias run's wall
        // clock and compare interval widths.
        BenchmarkCase bc{pb.name, pb, {0.9}, 5.0, truths[i]};
        BenchmarkConfig cfg;
        cfg.budget = {Budget::Kind::wall_seconds, std::max(r.wall_s, 0.05)};
        cfg.seed = g_seed;
        cfg.threads = g_threads;
        const BenchmarkReport rep = run_benchmark(bc, {Method::ea}, cfg);
        const double ea_ci = rep.rows[0].est.ci_half;
        out.require(r.ci_half > ea_ci,
                    fmt("debias ci %.3f wider than wall-matched ea ci %.3f", r.ci_half, ea_ci));
    }
    return out;
}

// ---- criterion 3: 2D reproduction against the reported intervals ----
Outcome criterion3() {
    Outcome out;
    const PdeProblem pb = make_poisson_drift_2d();
    // The combined standard error carries our Monte Carlo error, the
    // reference's reported interval, and the reference's printed precision
    // (three significant digits; half-ulp/sqrt(3) as a quantization sd).
    const struct {
        Vec x;
        double ref, ref_ci, quant;
    } cases[] = {{{0.2, 0.2}, 5.29e-2, 0.01e-2, 0.005e-2 / 1.7320508},
                 {{0.8, 0.8}, 6.81e-1, 0.001e-1, 0.005e-1 / 1.7320508}};
    for (const auto& c : cases) {
        EaConfig cfg;
        cfg.threads = g_threads;
        const EstimatorResult r = estimate_ea(pb, c.x, 2.0, 1000000, g_seed, cfg);
        const double se_ref = c.ref_ci / 1.959963984540054;
        const double comb =
            std::sqrt(se_of(r) * se_of(r) + se_ref * se_ref + c.quant * c.quant);
        out.require(std::abs(r.mean - c.ref) < 3.0 * comb,
                    fmt("x=(%.1f,%.1f)", c.x[0], c.x[1]) +
                        fmt(": %.5g vs %.3g (|d|=%.2g", r.mean, c.ref,
                            std::abs(r.mean - c.ref)) +
                        fmt(", 3se=%.2g incl. printed precision)", 3.0 * comb));
    }
    return out;
}

// ---- criterion 4: Euler ladder approaches the exact estimate ----
Outcome criterion4() {
    Outcome out;
    const PdeProblem pb = make_poisson_drift_2d();
    const Vec x{0.2, 0.2};
    const double t = 2.0;
    EaConfig cfg;
    cfg.threads = g_threads;
    const EstimatorResult ea = estimate_ea(pb, x, t, 1000000, g_seed, cfg);
    double first_gap = 0.0, last_gap = 0.0, last_comb = 0.0;
    for (int spu = 2; spu <= 1024; spu *= 2) {
        const EstimatorResult e = euler_estimate(
            pb, x, t, static_cast<std::int64_t>(spu * t), 1000000, g_seed + spu, g_threads);
        const double gap = std::abs(e.mean - ea.mean);
        if (spu == 2) first_gap = gap;
        if (spu == 1024) {
            last_gap = gap;
            last_comb = std::sqrt(se_of(e) * se_of(e) + se_of(ea) * se_of(ea));
        }
    }
    out.require(last_gap < 3.0 * last_comb,
                fmt("1024 steps/unit gap %.2g < 3 combined se %.2g", last_gap, 3.0 * last_comb));
    out.require(last_gap < first_gap,
                fmt("bias shrinks along the ladder (%.3g -> %.3g)", first_gap, last_gap));
    return out;
}

// ---- criterion 5: first-passage sampler correctness ----
Outcome criterion5() {
    Outcome out;
    RngStream rng(g_seed, 100);
    const std::size_t n = 1000000;
    double sum = 0.0;
    std::size_t plus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = sample_fpt_symmetric(1.0, rng);
        sum += s.time;
        plus += s.side > 0;
    }
    const double mean = sum / static_cast<double>(n);
    const double se = std::sqrt(2.0 / 3.0 / static_cast<double>(n));
    out.require(std::abs(mean - 1.0) < 3.0 * se, fmt("mean %.5f vs 1 (3se %.2g)", mean, 3 * se));
    const double side_dev = std::abs(static_cast<double>(plus) / n - 0.5);
    out.require(side_dev < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)),
                fmt("side balance dev %.2g", side_dev));

    const std::size_t m = 100000;
    std::vector<double> xs(m);
    for (auto& v : xs) v = sample_fpt_symmetric(1.0, rng).time;
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double f = series::fpt_unit_cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / m));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / m - f));
    }
    const double crit = 1.628 / std::sqrt(static_cast<double>(m));
    out.require(d < crit, fmt("KS %.4g < %.4g at 1%%", d, crit));
    return out;
}

// ---- criterion 6: skeleton law equals the fine-grid oracle ----
Outcome criterion6() {
    Outcome out;
    struct Case {
        PdeProblem pb;
        Vec x;
        double t;
    };
    const Case cases[] = {{make_adv_diff_1d(0.01, 0.1), {0.9}, 5.0},
                          {make_poisson_drift_2d(), {0.2, 0.2}, 2.0}};
    for (const auto& c : cases) {
        const auto steps = static_cast<std::int64_t>(std::llround(c.t / 1e-4));
        const StoppedStats oracle =
            euler_stopped_stats(c.pb, c.x, c.t, steps, 1000000, g_seed + 17, g_threads);

        const EaProblem ea = make_ea(c.pb, c.x, c.t);
        const std::size_t n = 1000000;
        RngStream root(g_seed, 200);
        double s_ab = 0.0;
        Vec s_pos(c.pb.dim, 0.0), s_pos2(c.pb.dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            RngStream r = root.child(i);
            Skeleton sk = simulate_skeleton(ea, r);
            s_ab += sk.absorbed ? 1.0 : 0.0;
            const Vec xo = ea.sde.to_original(sk.terminal);
            for (int k = 0; k < c.pb.dim; ++k) {
                s_pos[k] += xo[k];
                s_pos2[k] += xo[k] * xo[k];
            }
        }
        const double dn = static_cast<double>(n);
        const double ab = s_ab / dn;
        const double ab_se = std::sqrt(ab * (1.0 - ab) / dn);
        const double comb_ab =
            std::sqrt(ab_se * ab_se + oracle.absorb_se * oracle.absorb_se);
        out.require(std::abs(ab - oracle.absorb_mean) <= 3.0 * comb_ab + 1e-12,
                    c.pb.name + fmt(": absorb %.5f vs %.5f (3se %.2g)", ab, oracle.absorb_mean,
                                    3.0 * comb_ab));
        for (int k = 0; k < c.pb.dim; ++k) {
            const double pm = s_pos[k] / dn;
            const double pv = std::max(0.0, (s_pos2[k] - s_pos[k] * s_pos[k] / dn) / (dn - 1.0));
            const double pse = std::sqrt(pv / dn);
            const double comb =
                std::sqrt(pse * pse + oracle.position_se[k] * oracle.position_se[k]);
            out.require(std::abs(pm - oracle.position_mean[k]) <= 3.0 * comb + 1e-12,
                        fmt("terminal[%.0f] %.5f vs %.5f", static_cast<double>(k), pm,
                            oracle.position_mean[k]) +
                            fmt(" (3se %.2g)", 3.0 * comb));
        }
    }
    return out;
}

// ---- criterion 7: exact identities ----
Outcome criterion7() {
    Outcome out;
    // (a) coupling: ladder levels equal the explicit-array evaluation bit for bit.
    {
        const PdeProblem pb = make_adv_diff_1d(0.01, 0.1);
        const auto halting = HaltingDistribution::geometric(0.45);
        RngStream root(g_seed, 300);
        bool all_equal = true;
        for (int i = 0; i < 100; ++i) {
            RngStream r1 = root.child(i), r2 = root.child(i);
            const LadderDraw d = sample_ladder(pb, {0.9}, 5.0, halting, r1);
            const int H = halting.sample(r2);
            const std::int64_t fine = std::int64_t{1} << H;
            const double sh = std::sqrt(5.0 / static_cast<double>(fine));
            std::vector<double> incr(fine);
            for (auto& v : incr) v = sh * r2.normal();
            for (int j = 0; j <= H; ++j) {
                std::uint64_t w = 0;
                if (euler_functional(pb, {0.9}, 5.0, j, H, incr, w) != d.level_values[j])
                    all_equal = false;
            }
        }
        out.require(all_equal, "coupling partial sums bit-exact");
    }
    // (b) grad A = alpha to 1e-6 on both builtins.
    {
        bool ok = true;
        for (int which = 0; which < 2; ++which) {
            const PdeProblem pb =
                which == 0 ? make_adv_diff_1d(0.01, 0.3) : make_poisson_drift_2d();
            const Vec x0 = which == 0 ? Vec{0.5} : Vec{0.5, 0.5};
            const EaProblem ea = make_ea(pb, x0, 1.0);
            RngStream rng(g_seed, 301);
            Vec v(pb.dim), a(pb.dim), vp(pb.dim), vm(pb.dim);
            for (int pt = 0; pt < 100; ++pt) {
                for (int k = 0; k < pb.dim; ++k) {
                    const double lo = ea.sde.domain->lo[k], hi = ea.sde.domain->hi[k];
                    v[k] = lo + (hi - lo) * (0.01 + 0.98 * rng.uniform());
                }
                ea.sde.alpha(v, 0.0, a);
                double num = 0.0, den = 1.0;
                vp = v;
                vm = v;
                for (int k = 0; k < pb.dim; ++k) {
                    den += a[k] * a[k];
                    vp[k] = v[k] + 1e-5;
                    vm[k] = v[k] - 1e-5;
                    const double g =
                        (ea.sde.potential(vp, 0.0) - ea.sde.potential(vm, 0.0)) / 2e-5;
                    num += (g - a[k]) * (g - a[k]);
                    vp[k] = v[k];
                    vm[k] = v[k];
                }
                if (std::sqrt(num) / std::sqrt(den) > 1e-6) ok = false;
            }
        }
        out.require(ok, "grad A matches alpha (rel < 1e-6)");
    }
    // (c) absorbed skeleton positions sit bit-exactly on domain faces.
    {
        const EaProblem ea = make_ea(make_poisson_drift_2d(), {0.2, 0.2}, 2.0);
        RngStream root(g_seed, 302);
        bool ok = true;
        int absorbed = 0;
        for (int i = 0; i < 10000; ++i) {
            RngStream r = root.child(i);
            Skeleton sk = simulate_skeleton(ea, r);
            if (!sk.absorbed) continue;
            ++absorbed;
            const auto& dom = *ea.sde.domain;
            const double face = sk.face_side < 0 ? dom.lo[sk.face_dim] : dom.hi[sk.face_dim];
            if (sk.terminal[sk.face_dim] != face) ok = false;
        }
        out.require(ok && absorbed > 0, fmt("absorbed faces bit-exact (%.0f paths)",
                                            static_cast<double>(absorbed)));
    }
    // (d) seeded runs identical across thread counts.
    {
        const PdeProblem pb = make_adv_diff_1d(0.01, 0.2);
        EaConfig c1, c4;
        c1.threads = 1;
        c4.threads = 4;
        const EstimatorResult a = estimate_ea(pb, {0.9}, 2.0, 5000, g_seed, c1);
        const EstimatorResult b = estimate_ea(pb, {0.9}, 2.0, 5000, g_seed, c4);
        DebiasConfig d1, d4;
        d1.threads = 1;
        d4.threads = 4;
        const EstimatorResult da = estimate_debiased(pb, {0.9}, 2.0, 4000, g_seed, d1);
        const EstimatorResult db = estimate_debiased(pb, {0.9}, 2.0, 4000, g_seed, d4);
        out.require(a.mean == b.mean && a.sd == b.sd && a.work == b.work &&
                        da.mean == db.mean && da.work == db.work,
                    "thread-count reproducibility bit-exact");
    }
    return out;
}

// ---- criterion 8: free-space identity on random cases ----
Outcome criterion8() {
    Outcome out;
    RngStream rng(g_seed, 400);
    int contained95 = 0;
    for (int i = 0; i < 10; ++i) {
        const double a = 0.01 + 0.04 * rng.uniform();
        const double b = 0.05 + 0.25 * rng.uniform();
        const double x = 0.2 + 0.6 * rng.uniform();
        const double t = 0.5 + 1.5 * rng.uniform();
        PdeProblem pb;
        pb.dim = 1;
        pb.diffusion = DiffusionField::diag_const({std::sqrt(2.0 * a)});
        pb.drift = DriftField::constant({-b});
        pb.initial = ScalarField::linear(0.0, {100.0});
        EaConfig cfg;
        cfg.threads = g_threads;
        const EstimatorResult r = estimate_ea(pb, {x}, t, 100000, g_seed + i, cfg);
        const double truth = 100.0 * (x - b * t);
        if (std::abs(r.mean - truth) <= r.ci_half) ++contained95;
        out.require(std::abs(r.mean - truth) <= 3.0 * se_of(r),
                    fmt("case %.0f |d|=%.3g", static_cast<double>(i),
                        std::abs(r.mean - truth)));
    }
    out.detail += fmt("; 95%% CI contained truth in %.0f/10 cases",
                      static_cast<double>(contained95));
    return out;
}

// ---- criterion 9: cost model ----
Outcome criterion9() {
    Outcome out;
    {
        const auto ew = expected_work(HaltingDistribution::geometric(0.45), 20);
        const double closed = (std::pow(1.1, 21) - 1.0) / 0.1;
        out.require(ew.divergent && std::abs(ew.partial_sum - closed) < 1e-9 * closed,
                    fmt("geometric(0.45) partial sum %.6f", ew.partial_sum));
    }
    {
        const auto ew = expected_work(HaltingDistribution::power(2.0), 40);
        out.require(!ew.divergent &&
                        std::abs(ew.partial_sum - (2.0 - std::exp2(-40.0))) < 1e-12,
                    "power(2) sum -> 2");
    }
    {
        const auto ew = expected_work(HaltingDistribution::power(1.0), 17);
        out.require(ew.divergent && std::abs(ew.partial_sum - 18.0) < 1e-12,
                    "power(1) partial sum = j_max + 1");
    }
    {
        DebiasConfig dc;
        dc.threads = g_threads;
        const EstimatorResult r =
            estimate_debiased(make_adv_diff_1d(0.01, 0.1), {0.9}, 5.0, 10000, g_seed, dc);
        const double ratio =
            static_cast<double>(r.work_max) / static_cast<double>(std::max<std::uint64_t>(
                                                  r.work_median, 1));
        out.require(ratio > 3.0, fmt("per-draw work max/median = %.1f (> 3)", ratio));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    g_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (g_threads < 1) g_threads = 1;
    g_seed = seed_from_env_or(2);
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
        if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) g_seed = std::strtoull(argv[++i], nullptr, 10);
        if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) g_threads = std::atoi(argv[++i]);
    }
    std::printf("acceptance suite: seed=%llu threads=%d\n",
                static_cast<unsigned long long>(g_seed), g_threads);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"table 1 reproduction, exact algorithm (n = 1e6 per row)", criterion1},
        {"table 1 reproduction, debiasing (geometric(0.45), N = 1e5)", criterion2},
        {"2d reproduction at both evaluation points (n = 1e6)", criterion3},
        {"euler ladder converges to the exact estimate", criterion4},
        {"first-passage sampler: mean, sides, KS", criterion5},
        {"skeleton law matches the fine-grid oracle (h = 1e-4, n = 1e6)", criterion6},
        {"exact identities: coupling, potential, faces, reproducibility", criterion7},
        {"free-space identity on 10 random cases (n = 1e5 each)", criterion8},
        {"cost model: closed forms and heavy-tailed work", criterion9},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (only != 0 && only != id) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id,
                    criteria[i].first.c_str(), wall);
        if (!o.detail.empty()) std::printf("        %s\n", o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf(failures == 0 ? "acceptance: all criteria passed\n"
                              : "acceptance: %d criteria FAILED\n",
                failures);
    return failures;
}

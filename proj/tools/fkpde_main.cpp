// fkpde: unbiased local PDE solutions by exact path simulation or debiased
// Euler ladders. Subcommands: solve, table1, fig2d, benchmark, oracle.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fkpde/bench.hpp"
#include "fkpde/builtin.hpp"
#include "fkpde/debias.hpp"
#include "fkpde/errors.hpp"
#include "fkpde/euler.hpp"
#include "fkpde/problem_file.hpp"
#include "fkpde/transform.hpp"

namespace {

using namespace fkpde;

struct CommonOpts {
    std::string builtin;
    std::vector<double> params;
    double a = std::numeric_limits<double>::quiet_NaN();  // adv_diff shorthands
    double b = std::numeric_limits<double>::quiet_NaN();
    std::string problem_file;
    std::string x_spec;
    double t = 1.0;
    std::uint64_t seed = seed_from_env_or(1);
    int threads = 0;  // 0: hardware count
    std::string out;
    std::string format = "csv";

    std::vector<double> effective_params() const {
        if (!std::isnan(a) || !std::isnan(b)) {
            if (std::isnan(a) || std::isnan(b))
                throw std::invalid_argument("--a and --b must be given together");
            return {a, b};
        }
        return params;
    }
};

Vec parse_point(const std::string& spec) {
    Vec x;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) x.push_back(std::stod(tok));
    if (x.empty()) throw std::invalid_argument("empty point spec");
    return x;
}

HaltingDistribution parse_halting(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("halting spec: kind:param");
    const std::string kind = spec.substr(0, colon);
    const double p = std::stod(spec.substr(colon + 1));
    if (kind == "geom" || kind == "geometric") return HaltingDistribution::geometric(p);
    if (kind == "power") return HaltingDistribution::power(p);
    throw std::invalid_argument("unknown halting kind: " + kind);
}

PdeProblem load_problem(const CommonOpts& o) {
    if (!o.problem_file.empty()) return parse_problem_file(o.problem_file);
    if (!o.builtin.empty()) return builtin_problem(o.builtin, o.effective_params());
    throw std::invalid_argument("need --builtin or --problem");
}

int effective_threads(int flag) {
    if (flag > 0) return flag;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void emit(const CommonOpts& o, const BenchmarkReport& report) {
    const std::string body = o.format == "json" ? report_json(report) : report_csv(report);
    if (o.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file " + o.out);
    f << body;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_problem = true) {
    if (needs_problem) {
        cmd->add_option("--builtin", o.builtin, "builtin problem id");
        cmd->add_option("--param", o.params, "builtin numeric parameters");
        cmd->add_option("--a", o.a, "adv_diff_1d diffusion parameter");
        cmd->add_option("--b", o.b, "adv_diff_1d drift parameter");
        cmd->add_option("--problem", o.problem_file, "problem definition file");
    }
    cmd->add_option("--seed", o.seed, "rng seed (falls back to FKPDE_SEED)");
    cmd->add_option("--threads", o.threads, "worker threads (default: all cores)");
    cmd->add_option("--out", o.out, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void maybe_warn_halting(const PdeProblem& pb, const HaltingDistribution& halting) {
    const bool bounded = pb.dirichlet.has_value();
    const double strong_order =
        bounded ? 0.5 : (pb.diffusion.kind == DiffusionField::Kind::diag_const ? 1.0 : 0.5);
    if (halting.variance_divergent(strong_order))
        std::cerr << "warning: halting choice gives a divergent estimator variance at strong "
                     "order "
                  << strong_order << "\n";
    if (halting.work_divergent())
        std::cerr << "note: expected work for this halting choice is divergent; per-draw work "
                     "has heavy tails\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unbiased Feynman-Kac estimates of local PDE solutions"};
    app.require_subcommand(1);

    // solve
    CommonOpts so;
    std::string s_method = "ea", s_mode = "two_step", s_halting = "geom:0.45";
    std::size_t s_n = 10000, s_ndagger = 10000;
    std::int64_t s_steps = 1024;
    auto* solve = app.add_subcommand("solve", "estimate u(x,t) for one problem and point");
    add_common(solve, so);
    solve->add_option("--x", so.x_spec, "evaluation point, comma separated")->required();
    solve->add_option("--t", so.t, "time horizon")->required();
    solve->add_option("--method", s_method, "ea | debias | euler")
        ->check(CLI::IsMember({"ea", "debias", "euler"}));
    solve->add_option("--n", s_n, "sample paths (ea, euler)");
    solve->add_option("--ndagger", s_ndagger, "independent ladder draws (debias)");
    solve->add_option("--halting", s_halting, "halting law, geom:p or power:r");
    solve->add_option("--mode", s_mode, "ea acceptance mode: two_step | combined")
        ->check(CLI::IsMember({"two_step", "combined"}));
    solve->add_option("--steps", s_steps, "euler steps over [0,t]");
    double s_ci_z = 1.959963984540054;
    solve->add_option("--ci-z", s_ci_z, "normal quantile for the interval (default 95%)");

    // table1
    CommonOpts to;
    std::size_t t_n = 100000, t_ndagger = 100000;
    std::string t_methods = "ea,debias";
    auto* table1 = app.add_subcommand("table1", "advection-diffusion drift sweep (b = 0.1..0.4)");
    add_common(table1, to, false);
    table1->add_option("--n", t_n, "ea sample paths per row");
    table1->add_option("--ndagger", t_ndagger, "debias draws per row");
    table1->add_option("--methods", t_methods, "comma list: ea,debias");

    // fig2d
    CommonOpts fo;
    std::size_t f_n = 100000;
    auto* fig2d = app.add_subcommand(
        "fig2d", "2d example: euler step ladder (2..1024 steps per unit) against the exact value");
    add_common(fig2d, fo, false);
    fig2d->add_option("--x", fo.x_spec, "evaluation point")->required();
    fig2d->add_option("--t", fo.t, "time horizon")->required();
    fig2d->add_option("--n", f_n, "sample paths per estimate");

    // benchmark
    CommonOpts bo;
    std::string b_methods = "ea,debias,euler", b_halting = "geom:0.45";
    double b_samples = -1, b_work = -1, b_wall = -1;
    std::int64_t b_steps = 1024;
    auto* bench = app.add_subcommand("benchmark", "work-variance comparison of the methods");
    add_common(bench, bo);
    bench->add_option("--x", bo.x_spec, "evaluation point")->required();
    bench->add_option("--t", bo.t, "time horizon")->required();
    bench->add_option("--methods", b_methods, "comma list: ea,debias,euler");
    bench->add_option("--budget-samples", b_samples, "budget: sample count");
    bench->add_option("--budget-work", b_work, "budget: work units");
    bench->add_option("--budget-wall", b_wall, "budget: wall seconds");
    bench->add_option("--halting", b_halting, "debias halting law");
    bench->add_option("--steps", b_steps, "euler steps");

    // oracle
    CommonOpts oo;
    double o_h = 1e-4;
    std::size_t o_n = 1000000;
    auto* oracle = app.add_subcommand("oracle", "fine-step euler reference estimate");
    add_common(oracle, oo);
    oracle->add_option("--x", oo.x_spec, "evaluation point")->required();
    oracle->add_option("--t", oo.t, "time horizon")->required();
    oracle->add_option("--hstep", o_h, "step size (1e-3 or smaller recommended)");
    oracle->add_option("--n", o_n, "sample paths");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const PdeProblem pb = load_problem(so);
            const Vec x = parse_point(so.x_spec);
            const int threads = effective_threads(so.threads);
            BenchmarkReport rep;
            rep.case_id = pb.name.empty() ? "problem" : pb.name;
            MethodRow row;
            row.method = s_method;
            if (s_method == "ea") {
                EaConfig cfg;
                cfg.threads = threads;
                cfg.ci_level_z = s_ci_z;
                cfg.mode = s_mode == "combined" ? EaMode::combined : EaMode::two_step;
                row.param = s_mode;
                row.est = estimate_ea(pb, x, so.t, s_n, so.seed, cfg);
            } else if (s_method == "debias") {
                DebiasConfig cfg;
                cfg.halting = parse_halting(s_halting);
                cfg.threads = threads;
                cfg.ci_level_z = s_ci_z;
                maybe_warn_halting(pb, cfg.halting);
                row.param = s_halting;
                row.est = estimate_debiased(pb, x, so.t, s_ndagger, so.seed, cfg);
            } else {
                row.param = std::to_string(s_steps);
                row.est = euler_estimate(pb, x, so.t, s_steps, s_n, so.seed, threads);
            }
            row.wvp = static_cast<double>(row.est.work) * row.est.sd * row.est.sd;
            rep.rows.push_back(std::move(row));
            emit(so, rep);
        } else if (*table1) {
            const int threads = effective_threads(to.threads);
            BenchmarkReport rep;
            rep.case_id = "table1:adv_diff_1d(a=0.01)";
            for (double b : {0.1, 0.2, 0.3, 0.4}) {
                BenchmarkCase bc;
                bc.problem = make_adv_diff_1d(0.01, b);
                bc.id = bc.problem.name;
                bc.x = {0.9};
                bc.t = 5.0;
                std::vector<Method> methods;
                if (t_methods.find("ea") != std::string::npos) methods.push_back(Method::ea);
                if (t_methods.find("debias") != std::string::npos)
                    methods.push_back(Method::debias);
                for (Method m : methods) {
                    BenchmarkConfig cfg;
                    cfg.budget = {Budget::Kind::samples,
                                  static_cast<double>(m == Method::ea ? t_n : t_ndagger)};
                    cfg.seed = to.seed;
                    cfg.threads = threads;
                    BenchmarkReport one = run_benchmark(bc, {m}, cfg);
                    char p[16];
                    std::snprintf(p, sizeof(p), "b=%g", b);
                    one.rows[0].param = p;
                    rep.rows.push_back(std::move(one.rows[0]));
                }
            }
            emit(to, rep);
        } else if (*fig2d) {
            const PdeProblem pb = make_poisson_drift_2d();
            const Vec x = parse_point(fo.x_spec);
            const int threads = effective_threads(fo.threads);
            BenchmarkReport rep;
            rep.case_id = "poisson_drift_2d";
            for (int spu = 2; spu <= 1024; spu *= 2) {
                const auto steps = static_cast<std::int64_t>(spu * fo.t);
                MethodRow row;
                row.method = "euler";
                row.param = std::to_string(spu);
                row.est = euler_estimate(pb, x, fo.t, steps, f_n, fo.seed, threads);
                row.wvp = static_cast<double>(row.est.work) * row.est.sd * row.est.sd;
                rep.rows.push_back(std::move(row));
            }
            MethodRow ea_row;
            ea_row.method = "ea";
            EaConfig cfg;
            cfg.threads = threads;
            ea_row.est = estimate_ea(pb, x, fo.t, f_n, fo.seed, cfg);
            ea_row.wvp = static_cast<double>(ea_row.est.work) * ea_row.est.sd * ea_row.est.sd;
            rep.rows.push_back(std::move(ea_row));
            emit(fo, rep);
        } else if (*bench) {
            BenchmarkCase bc;
            bc.problem = load_problem(bo);
            bc.id = bc.problem.name.empty() ? "problem" : bc.problem.name;
            bc.x = parse_point(bo.x_spec);
            bc.t = bo.t;
            BenchmarkConfig cfg;
            if (b_samples >= 0)
                cfg.budget = {Budget::Kind::samples, b_samples};
            else if (b_work >= 0)
                cfg.budget = {Budget::Kind::work_units, b_work};
            else if (b_wall >= 0)
                cfg.budget = {Budget::Kind::wall_seconds, b_wall};
            else
                cfg.budget = {Budget::Kind::samples, 10000};
            cfg.seed = bo.seed;
            cfg.threads = effective_threads(bo.threads);
            cfg.halting = parse_halting(b_halting);
            cfg.euler_steps = b_steps;
            maybe_warn_halting(bc.problem, cfg.halting);
            std::vector<Method> methods;
            std::stringstream ss(b_methods);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok == "ea") methods.push_back(Method::ea);
                else if (tok == "debias") methods.push_back(Method::debias);
                else if (tok == "euler") methods.push_back(Method::euler);
                else throw std::invalid_argument("unknown method: " + tok);
            }
            emit(bo, run_benchmark(bc, methods, cfg));
        } else if (*oracle) {
            const PdeProblem pb = load_problem(oo);
            const Vec x = parse_point(oo.x_spec);
            BenchmarkReport rep;
            rep.case_id = pb.name.empty() ? "problem" : pb.name;
            MethodRow row;
            row.method = "oracle";
            row.param = "h=" + std::to_string(o_h);
            row.est = oracle_estimate(pb, x, oo.t, o_h, o_n, oo.seed, effective_threads(oo.threads));
            row.wvp = static_cast<double>(row.est.work) * row.est.sd * row.est.sd;
            rep.rows.push_back(std::move(row));
            emit(oo, rep);
        }
    } catch (const unsupported_problem& e) {
        std::cerr << "error: exact-algorithm path unavailable: " << e.what()
                  << "\n(the debiased estimator, --method debias, has no such restriction)\n";
        return 3;
    } catch (const bound_violation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const resource_limit& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

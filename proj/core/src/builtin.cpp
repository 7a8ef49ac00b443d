#include "fkpde/builtin.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fkpde/euler.hpp"

namespace fkpde {

PdeProblem make_adv_diff_1d(double a, double b) {
    if (!(a > 0.0)) throw std::invalid_argument("adv_diff_1d: need a > 0");
    PdeProblem pb;
    pb.dim = 1;
    pb.diffusion = DiffusionField::diag_const({std::sqrt(2.0 * a)});
    pb.drift = DriftField::constant({-b});
    pb.kill = ScalarField::zero();
    pb.kill_lo = pb.kill_hi = 0.0;
    pb.initial = ScalarField::linear(0.0, {100.0});
    DirichletBc bc;
    bc.domain = Hyperrectangle({0.0}, {1.0});
    bc.g_lo = {ScalarField::constant(0.0)};
    bc.g_hi = {ScalarField::constant(100.0)};
    pb.dirichlet = bc;
    pb.time_homogeneous = true;
    char name[64];
    std::snprintf(name, sizeof(name), "adv_diff_1d(a=%g b=%g)", a, b);
    pb.name = name;
    return pb;
}

PdeProblem make_poisson_drift_2d() {
    PdeProblem pb;
    pb.dim = 2;
    pb.diffusion = DiffusionField::diag_const({1.0, 1.0});
    pb.drift = DriftField::grad_exp_bilinear(0.5);
    pb.kill = ScalarField::zero();
    pb.kill_lo = pb.kill_hi = 0.0;
    pb.initial = ScalarField::product();
    DirichletBc bc;
    bc.domain = Hyperrectangle({0.0, 0.0}, {1.0, 1.0});
    bc.g_lo = {ScalarField::constant(0.0), ScalarField::constant(0.0)};
    bc.g_hi = {ScalarField::linear(0.0, {0.0, 1.0}),   // x1 = 1: g = x2
               ScalarField::linear(0.0, {1.0, 0.0})};  // x2 = 1: g = x1
    pb.dirichlet = bc;
    pb.time_homogeneous = true;
    pb.name = "poisson_drift_2d";
    return pb;
}

PdeProblem builtin_problem(const std::string& id, const std::vector<double>& params) {
    if (id == "adv_diff_1d") {
        if (params.size() != 2) throw std::invalid_argument("adv_diff_1d needs params (a, b)");
        return make_adv_diff_1d(params[0], params[1]);
    }
    if (id == "poisson_drift_2d") {
        if (!params.empty()) throw std::invalid_argument("poisson_drift_2d takes no params");
        return make_poisson_drift_2d();
    }
    throw std::invalid_argument("unknown builtin problem id: " + id);
}

std::vector<ReferenceCase> reference_cases() {
    std::vector<ReferenceCase> out;
    const char* labels[] = {"0.1", "0.2", "0.3", "0.4"};
    const double drifts[] = {0.1, 0.2, 0.3, 0.4};
    const double truth[] = {56.13, 19.03, 5.223, 1.833};
    for (int i = 0; i < 4; ++i) {
        ReferenceCase rc;
        rc.id = std::string("adv_diff_1d(a=0.01 b=") + labels[i] + ")";
        rc.problem = make_adv_diff_1d(0.01, drifts[i]);
        rc.x = {0.9};
        rc.t = 5.0;
        rc.value = truth[i];
        rc.ci_half = 0.0;
        rc.provenance = Provenance::paper_table;
        out.push_back(std::move(rc));
    }
    {
        ReferenceCase rc;
        rc.id = "poisson_drift_2d@(0.2,0.2)";
        rc.problem = make_poisson_drift_2d();
        rc.x = {0.2, 0.2};
        rc.t = 2.0;
        rc.value = 5.29e-2;
        rc.ci_half = 0.01e-2;
        rc.provenance = Provenance::paper_table;
        out.push_back(std::move(rc));
    }
    {
        ReferenceCase rc;
        rc.id = "poisson_drift_2d@(0.8,0.8)";
        rc.problem = make_poisson_drift_2d();
        rc.x = {0.8, 0.8};
        rc.t = 2.0;
        rc.value = 6.81e-1;
        rc.ci_half = 0.001e-1;
        rc.provenance = Provenance::paper_table;
        out.push_back(std::move(rc));
    }
    return out;
}

EstimatorResult oracle_estimate(const PdeProblem& problem, const Vec& x, double t, double h,
                                std::size_t n, std::uint64_t seed, int threads) {
    if (!(h > 0.0) || !(t > 0.0)) throw std::invalid_argument("oracle_estimate: h, t must be > 0");
    const auto steps = static_cast<std::int64_t>(std::llround(t / h));
    return euler_estimate(problem, x, t, std::max<std::int64_t>(steps, 1), n, seed, threads);
}

}  // namespace fkpde

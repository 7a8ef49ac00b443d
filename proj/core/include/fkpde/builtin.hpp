#pragma once

#include <string>
#include <vector>

#include "fkpde/estimator.hpp"
#include "fkpde/problem.hpp"

namespace fkpde {

// 1D advection-diffusion: u_t + b u_x = a u_xx on [0,1], f = 100x,
// u(0,.) = 0, u(1,.) = 100. Complementary SDE dX = -b ds + sqrt(2a) dW.
PdeProblem make_adv_diff_1d(double a, double b);

// 2D drift-diffusion with b = grad k, k = exp(x1 x2 / 2), unit diffusion
// 1/2 laplacian, on [0,1]^2 with f = x1 x2 and the mixed boundary data.
PdeProblem make_poisson_drift_2d();

// id in {adv_diff_1d, poisson_drift_2d}; params are (a, b) for the former.
PdeProblem builtin_problem(const std::string& id, const std::vector<double>& params = {});

enum class Provenance { paper_table, analytic, oracle };

struct ReferenceCase {
    std::string id;
    PdeProblem problem;
    Vec x;
    double t = 0.0;
    double value = 0.0;    // reference solution
    double ci_half = 0.0;  // reported half-width when the reference is itself an estimate
    Provenance provenance = Provenance::paper_table;
};

// The frozen reference table: four advection-diffusion drift settings at
// (x, t) = (0.9, 5) plus the two 2D evaluation points at t = 2.
std::vector<ReferenceCase> reference_cases();

// Brute-force fine-step Euler estimate, the independent oracle configuration
// used by the verification suites. Shares only the Gaussian sampler with the
// exact path.
EstimatorResult oracle_estimate(const PdeProblem& problem, const Vec& x, double t, double h,
                                std::size_t n, std::uint64_t seed, int threads = 1);

}  // namespace fkpde

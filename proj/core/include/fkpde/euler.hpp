#pragma once

#include <cstdint>
#include <cmath>
#include <span>

#include "fkpde/estimator.hpp"
#include "fkpde/problem.hpp"
#include "fkpde/rng.hpp"

namespace fkpde {

// Off-grid treatment of the killing integral: left-endpoint grid sum
// (piecewise-constant path) or the trapezoid (linear interpolation).
enum class EulerInterp { piecewise_constant, linear };

// Ladder configuration shared by the plain and debiased estimators: the base
// step is the horizon itself and each level halves it, h_j = t * 2^-j;
// Dirichlet stopping checks exits at grid points only.
struct EulerConfig {
    EulerInterp interp = EulerInterp::piecewise_constant;
    double base_step(double t) const { return t; }
    double step_at_level(double t, int level) const { return t * std::exp2(-level); }
};

// One Euler-Maruyama path over [0, t] with `steps` equal steps: draws the
// increments itself and returns the discrete Feynman-Kac integrand
//   f(X_t) exp(-h sum_m c(X_mh, t - mh))
// or, with Dirichlet data, the g/f switch with the killing sum truncated at
// the first grid index outside the domain.
double euler_path_value(const PdeProblem& problem, const Vec& x, double t, std::int64_t steps,
                        RngStream& rng, std::uint64_t& steps_done,
                        EulerInterp interp = EulerInterp::piecewise_constant);

// Same functional evaluated on level `level` of a dyadic ladder whose finest
// level is `fine_level`, driven by the given fine Brownian increments
// (length 2^fine_level * dim, componentwise layout per step). Coarse
// increments are dyadic pairwise sums of the fine ones, bit-exactly matching
// the production coupling.
double euler_functional(const PdeProblem& problem, const Vec& x, double t, int level,
                        int fine_level, std::span<const double> fine_increments,
                        std::uint64_t& steps_done);

// Plain fixed-step Monte Carlo estimate; this is also the brute-force
// oracle configuration used throughout the test suites.
EstimatorResult euler_estimate(const PdeProblem& problem, const Vec& x, double t,
                               std::int64_t steps, std::size_t n, std::uint64_t seed,
                               int threads = 1, double ci_level_z = 1.959963984540054,
                               EulerInterp interp = EulerInterp::piecewise_constant);

// Stopped-state statistics of the discrete path in one pass: absorption
// frequency, terminal position means, and the boundary/initial functional.
// This is the reference law the exact skeletons are checked against.
struct StoppedStats {
    double absorb_mean = 0.0, absorb_se = 0.0;
    Vec position_mean, position_se;  // per dimension
    double kappa_mean = 0.0, kappa_se = 0.0;
    std::size_t n = 0;
};
StoppedStats euler_stopped_stats(const PdeProblem& problem, const Vec& x, double t,
                                 std::int64_t steps, std::size_t n, std::uint64_t seed,
                                 int threads = 1);

}  // namespace fkpde

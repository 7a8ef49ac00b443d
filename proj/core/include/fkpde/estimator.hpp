#pragma once

#include <cstdint>
#include <string>

#include "fkpde/lea.hpp"
#include "fkpde/skeleton.hpp"
#include "fkpde/transform.hpp"

namespace fkpde {

// One path functional draw: the Feynman-Kac integrand evaluated on an exact
// skeleton, with the killing weight realized by Poisson thinning.
struct PathFunctionalSample {
    double value = 0.0;
    std::uint64_t poisson_count = 0;  // killing-weight points
    double t_hat = 0.0;
    std::uint64_t work = 0;  // segments proposed + Poisson points evaluated
};

struct EstimatorResult {
    double mean = 0.0;
    double sd = 0.0;
    double ci_half = 0.0;  // z * sd / sqrt(n)
    bool ci_defined = false;
    std::size_t n = 0;
    std::uint64_t work = 0;
    double wall_s = 0.0;  // measured; excluded from bit-exact guarantees
    std::uint64_t work_max = 0;
    std::uint64_t work_median = 0;
};

enum class EaMode { two_step, combined };

// kappa(eta^{-1}(Y_that)) * prod_j (M_c - c(.))/(M_c - L_c) * exp(-L_c that)
// on a completed skeleton. In combined mode the killing is already inside
// the acceptance and the skeleton's survival weight is applied instead.
PathFunctionalSample path_functional(Skeleton& skeleton, const EaProblem& ea, RngStream& rng);

struct EaConfig {
    EaMode mode = EaMode::two_step;
    int threads = 1;
    double ci_level_z = 1.959963984540054;  // 95%
    LeaConfig lea;
};

EstimatorResult estimate_ea(const EaProblem& ea, std::size_t n, std::uint64_t seed,
                            const EaConfig& config = {});

// Convenience: builds the transform and bounds first (throws
// unsupported_problem when the exact path does not apply).
EstimatorResult estimate_ea(const PdeProblem& problem, const Vec& x, double t, std::size_t n,
                            std::uint64_t seed, const EaConfig& config = {});

// Boundary/initial switch shared by the exact and Euler paths: g on the
// exit face when absorbed, f at the terminal point otherwise.
double kappa_value(const PdeProblem& problem, const Vec& x_original, bool absorbed, int face_dim,
                   int face_side, double t_pde);

}  // namespace fkpde

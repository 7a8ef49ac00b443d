#pragma once

#include <cstdint>
#include <vector>

#include "fkpde/estimator.hpp"
#include "fkpde/problem.hpp"
#include "fkpde/rng.hpp"

namespace fkpde {

// Halting distribution of the randomized truncation. P(H >= 0) = 1 and
// P(H >= j) > 0 for all j, strictly decreasing.
struct HaltingDistribution {
    enum class Kind { geometric, power };
    Kind kind = Kind::geometric;
    double param = 0.45;

    // P(H = j) = p (1-p)^j, so P(H >= j) = (1-p)^j.
    static HaltingDistribution geometric(double p);
    // P(H >= j) = 2^{-j r}.
    static HaltingDistribution power(double r);

    double prob_ge(int j) const;
    int sample(RngStream& rng) const;

    // Expected work sum_j 2^j P(H >= j) diverges.
    bool work_divergent() const;
    // Variance series sum_j 2^{-2 p j} / P(H >= j) diverges at strong order p.
    bool variance_divergent(double strong_order) const;
};

struct ExpectedWork {
    double partial_sum = 0.0;  // sum_{j=0}^{j_max} 2^j P(H >= j)
    bool divergent = false;
};
ExpectedWork expected_work(const HaltingDistribution& halting, int j_max);

enum class CouplingMode {
    // Simulate the finest level's increments and aggregate upward through a
    // dyadic carry tree (coarse increments are bit-exact pair sums).
    aggregate_fine,
    // Draw the coarsest increment and refine by Brownian-bridge splitting;
    // kept for cross-checking, not the default.
    bridge_refine,
};

// A single randomized-truncation draw: every ladder level evaluated on one
// shared driving Brownian path.
struct LadderDraw {
    int halt = 0;                      // H
    std::vector<double> level_values;  // u~_{h_j}, j = 0..H
    std::vector<double> deltas;        // level differences, deltas[0] = level_values[0]
    std::vector<double> weights;       // 1 / P(H >= j)
    double value = 0.0;                // sum_j weights[j] * deltas[j]
    std::uint64_t work = 0;            // level steps actually executed
};

LadderDraw sample_ladder(const PdeProblem& problem, const Vec& x, double t,
                         const HaltingDistribution& halting, RngStream& rng,
                         CouplingMode coupling = CouplingMode::aggregate_fine);

struct DebiasConfig {
    HaltingDistribution halting = HaltingDistribution::geometric(0.45);
    CouplingMode coupling = CouplingMode::aggregate_fine;
    int threads = 1;
    double ci_level_z = 1.959963984540054;
};

// Mean of n_draws independent ladder draws with a CLT interval; work
// dispersion (max and median per draw) is surfaced in the result.
EstimatorResult estimate_debiased(const PdeProblem& problem, const Vec& x, double t,
                                  std::size_t n_draws, std::uint64_t seed,
                                  const DebiasConfig& config = {});

}  // namespace fkpde

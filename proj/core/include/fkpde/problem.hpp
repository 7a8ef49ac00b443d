#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "fkpde/coefficients.hpp"
#include "fkpde/errors.hpp"
#include "fkpde/geometry.hpp"

namespace fkpde {

// Dirichlet data on a hyperrectangle: one boundary function per face.
struct DirichletBc {
    Hyperrectangle domain;
    std::vector<ScalarField> g_lo;  // face x_k = domain.lo[k]
    std::vector<ScalarField> g_hi;  // face x_k = domain.hi[k]

    double g(int k, int side, const Vec& x_on_face, double t) const {
        return side < 0 ? g_lo[k](x_on_face, t) : g_hi[k](x_on_face, t);
    }
};

// The estimation target: a parabolic initial(-boundary) value problem
//   du/dt = 1/2 sum a_ij d2u/dx_i dx_j + sum b_i du/dx_i - c u
// with u(x,0) = f(x) and, when `dirichlet` is set, u = g on the boundary.
struct PdeProblem {
    int dim = 1;
    DiffusionField diffusion;  // sigma, with a = sigma sigma^T
    DriftField drift;          // b(x, t)
    ScalarField kill;          // c(x, t)
    double kill_lo = 0.0;      // global bounds: kill_lo <= c <= kill_hi, kill_lo >= 0
    double kill_hi = 0.0;
    ScalarField initial;       // f(x)
    std::optional<DirichletBc> dirichlet;
    bool time_homogeneous = true;
    std::string name;

    void validate() const {
        if (dim < 1) throw std::invalid_argument("problem: dimension must be >= 1");
        if (kill_lo < 0.0 || kill_hi < kill_lo)
            throw std::invalid_argument("problem: need 0 <= kill_lo <= kill_hi");
        if (dirichlet) {
            if (dirichlet->domain.dim() != dim)
                throw std::invalid_argument("problem: domain dimension mismatch");
            if (dirichlet->g_lo.size() != static_cast<std::size_t>(dim) ||
                dirichlet->g_hi.size() != static_cast<std::size_t>(dim))
                throw std::invalid_argument("problem: need one g per face");
        }
        if (diffusion.kind == DiffusionField::Kind::diag_const &&
            diffusion.diag.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("problem: sigma diagonal size mismatch");
        if (diffusion.kind == DiffusionField::Kind::scalar_fn && dim != 1)
            throw std::invalid_argument("problem: scalar sigma(x) is 1D only");
    }

    // Killing rate with its declared global bounds enforced at every
    // evaluation; leaving the band aborts the run.
    double kill_checked(const Vec& x, double t) const {
        const double v = kill(x, t);
        const double tol = 1e-12 * (1.0 + std::abs(kill_hi));
        if (v < kill_lo - tol || v > kill_hi + tol)
            throw bound_violation("killing rate left its declared [lo, hi] band");
        return v;
    }
};

inline std::uint64_t seed_from_env_or(std::uint64_t fallback) {
    if (const char* s = std::getenv("FKPDE_SEED")) return std::strtoull(s, nullptr, 10);
    return fallback;
}

}  // namespace fkpde

#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "fkpde/problem.hpp"
#include "fkpde/rng.hpp"

namespace fkpde {

// The diffusion appearing in the Feynman-Kac identity for `problem` at
// (x, t): dX_s = b(X, t-s) ds + sigma(X, t-s) dW_s started at x. Path time s
// runs forward from 0 to the horizon t; coefficient evaluations flip it to
// PDE time t - s.
struct ComplementarySde {
    PdeProblem problem;
    Vec start;
    double horizon = 0.0;

    void drift(const Vec& x, double s, Vec& out) const {
        problem.drift.eval(x, horizon - s, out);
    }
    // Diagonal entry a_kk = sigma_k^2 (diagonal kinds only).
    double a_diag(const Vec& x, double s, int k) const;
    double sigma_diag(const Vec& x, double s, int k) const;
};

ComplementarySde complementary_sde(const PdeProblem& problem, const Vec& x, double t);

// Box bounds consumed by the acceptance step: phi_lo <= phi <= phi_hi and
// A <= a_max over the queried box (and path-time span, for the
// time-inhomogeneous case).
struct PhiBounds {
    double phi_lo = 0.0;
    double phi_hi = 0.0;
    double a_max = 0.0;
};

class BoundOracle {
public:
    using BoxFn = std::function<PhiBounds(const Hyperrectangle&, double s0, double s1)>;

    BoundOracle() = default;
    explicit BoundOracle(BoxFn fn) : box_fn_(std::move(fn)) {}

    PhiBounds get(const Hyperrectangle& box, double s0, double s1) const {
        if (use_global_ && global_) return *global_;
        return box_fn_(box, s0, s1);
    }

    bool valid() const { return static_cast<bool>(box_fn_); }

    // Domain-wide constants, applied to every segment when enabled.
    void set_global(PhiBounds b) { global_ = b; }
    void prefer_global(bool on) { use_global_ = on; }
    bool has_global() const { return global_.has_value(); }

private:
    BoxFn box_fn_;
    std::optional<PhiBounds> global_;
    bool use_global_ = false;
};

// Lamperti-transformed process dY = alpha(Y, s) ds + dW with potential
// A (grad A = alpha) and phase phi = 1/2 (|alpha|^2 + div alpha + 2 dA/ds).
// Everything downstream of the transform works in these coordinates.
struct UnitVolatilitySde {
    int dim = 1;
    double horizon = 0.0;
    Vec start;                                   // eta(x)
    std::optional<Hyperrectangle> domain;        // image of the PDE domain
    bool time_homogeneous = true;

    std::function<void(const Vec&, double, Vec&)> alpha;  // (v, path time s)
    std::function<double(const Vec&, double)> potential;  // A(v, s)
    std::function<double(const Vec&, double)> phase;      // phi(v, s)
    std::function<void(const Vec&, Vec&)> inverse;        // eta^{-1}
    std::function<void(const Vec&, Vec&)> forward;        // eta

    Vec to_original(const Vec& v) const {
        Vec x(v.size());
        inverse(v, x);
        return x;
    }
};

// Optional user hooks for problems outside the coefficient registry.
struct EaHooks {
    std::function<double(const Vec&, double)> potential;  // A(v, s), transformed coords
    std::function<double(const Vec&, double)> phase;      // phi(v, s); FD fallback if absent
    std::function<PhiBounds(const Hyperrectangle&, double, double)> bounds;
};

// Builds the unit-volatility process, or throws unsupported_problem when the
// transform or the potential is unavailable (the two EA applicability
// restrictions). Numerically verifies grad A = alpha and the transform
// round trip at construction.
UnitVolatilitySde lamperti_transform(const ComplementarySde& sde);
UnitVolatilitySde lamperti_transform_with_hooks(const ComplementarySde& sde,
                                                const std::optional<EaHooks>& hooks);

// phi, the combined phi + c mode, and A as free functions.
double phi(const UnitVolatilitySde& sde, const Vec& v, double s);
double phi_tilde(const UnitVolatilitySde& sde, const PdeProblem& problem, const Vec& v, double s);
double potential_A(const UnitVolatilitySde& sde, const Vec& v, double s);

// Everything the exact-algorithm estimator needs, immutable and shareable
// across threads.
struct EaProblem {
    PdeProblem problem;
    UnitVolatilitySde sde;
    BoundOracle bounds;
};

EaProblem make_ea(const PdeProblem& problem, const Vec& x, double t,
                  const std::optional<EaHooks>& hooks = std::nullopt);

}  // namespace fkpde

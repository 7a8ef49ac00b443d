#include "fkpde/transform.hpp"

#include <cmath>
#include <utility>

#include "fkpde/errors.hpp"

namespace fkpde {

namespace {

// Adaptive Simpson for the 1D transform integral.
double simpson(const std::function<double(double)>& f, double a, double b, double tol,
               int depth = 0) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double s = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double lc = 0.5 * (a + c), rc = 0.5 * (c + b);
    const double s2 = (b - a) / 12.0 * (f(a) + 4.0 * f(lc) + 2.0 * fc + 4.0 * f(rc) + fb);
    if (depth > 48 || std::abs(s2 - s) < 15.0 * tol) return s2 + (s2 - s) / 15.0;
    return simpson(f, a, c, 0.5 * tol, depth + 1) + simpson(f, c, b, 0.5 * tol, depth + 1);
}

// Numeric eta / eta^{-1} for the 1D non-constant sigma case. sigma must be
// time-constant here; the transform is built once per (x, t).
class NumericTransform1d {
public:
    NumericTransform1d(std::function<double(double)> sigma, double x_ref)
        : sigma_(std::move(sigma)), x_ref_(x_ref) {}

    double forward(double x) const {
        if (x == x_ref_) return 0.0;
        const double v = simpson([this](double u) { return 1.0 / sigma_checked(u); },
                                 std::min(x_ref_, x), std::max(x_ref_, x), 1e-14);
        return x >= x_ref_ ? v : -v;
    }

    double inverse(double v) const {
        // Newton iteration with bisection safeguarding; d(eta^{-1})/dv = sigma.
        double lo = x_ref_, hi = x_ref_;
        double step = std::max(1.0, std::abs(v));
        while (forward(hi) < v) hi += step, step *= 2.0;
        step = std::max(1.0, std::abs(v));
        while (forward(lo) > v) lo -= step, step *= 2.0;
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double fv = forward(x) - v;
            if (fv > 0.0)
                hi = x;
            else
                lo = x;
            const double nx = x - fv * sigma_checked(x);
            x = (nx > lo && nx < hi) ? nx : 0.5 * (lo + hi);
            if (std::abs(fv) < 1e-14 * (1.0 + std::abs(v)) && hi - lo < 1e-12 * (1.0 + std::abs(x)))
                return x;
        }
        return x;
    }

private:
    double sigma_checked(double x) const {
        const double s = sigma_(x);
        if (!(s > 0.0)) throw unsupported_problem("lamperti: sigma must be strictly positive");
        return s;
    }

    std::function<double(double)> sigma_;
    double x_ref_;
};

// Central-difference divergence of alpha plus the time term, used when no
// exact phase closure is available.
double phase_fd(const UnitVolatilitySde& sde, const Vec& v, double s) {
    const int d = sde.dim;
    Vec a(d), ap(d), am(d), vp(v), vm(v);
    sde.alpha(v, s, a);
    double norm2 = 0.0, div = 0.0;
    for (int k = 0; k < d; ++k) {
        norm2 += a[k] * a[k];
        const double h = 1e-6 * (1.0 + std::abs(v[k]));
        vp[k] = v[k] + h;
        vm[k] = v[k] - h;
        sde.alpha(vp, s, ap);
        sde.alpha(vm, s, am);
        div += (ap[k] - am[k]) / (2.0 * h);
        vp[k] = v[k];
        vm[k] = v[k];
    }
    double dt_term = 0.0;
    if (!sde.time_homogeneous) {
        const double hs = 1e-6 * (1.0 + std::abs(s));
        dt_term = (sde.potential(v, s + hs) - sde.potential(v, s - hs)) / hs;  // 2 dA/ds
    }
    return 0.5 * (norm2 + div + dt_term);
}

void verify_construction(const UnitVolatilitySde& sde, const ComplementarySde& src) {
    RngStream rng(0x5eedbeef, 17);
    const int d = sde.dim;

    // Sampling box in transformed coordinates.
    Vec lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
        if (sde.domain) {
            lo[k] = sde.domain->lo[k];
            hi[k] = sde.domain->hi[k];
        } else {
            lo[k] = sde.start[k] - 1.0;
            hi[k] = sde.start[k] + 1.0;
        }
    }

    Vec v(d), a(d), vp(d), vm(d), x(d), back(d), fwd(d);
    for (int pt = 0; pt < 100; ++pt) {
        for (int k = 0; k < d; ++k) v[k] = lo[k] + (hi[k] - lo[k]) * (0.01 + 0.98 * rng.uniform());
        const double s = sde.time_homogeneous ? 0.0 : sde.horizon * rng.uniform();

        // grad A == alpha, step 1e-5, relative to 1 + |alpha|.
        sde.alpha(v, s, a);
        double num = 0.0, den = 1.0;
        for (int k = 0; k < d; ++k) den += a[k] * a[k];
        den = std::sqrt(den);
        vp = v;
        vm = v;
        for (int k = 0; k < d; ++k) {
            const double h = 1e-5;
            vp[k] = v[k] + h;
            vm[k] = v[k] - h;
            const double grad = (sde.potential(vp, s) - sde.potential(vm, s)) / (2.0 * h);
            num += (grad - a[k]) * (grad - a[k]);
            vp[k] = v[k];
            vm[k] = v[k];
        }
        if (std::sqrt(num) / den > 1e-6)
            throw unsupported_problem("lamperti: supplied potential does not integrate the drift");

        // Transform round trip in original coordinates.
        for (int k = 0; k < d; ++k) {
            const double olo = src.problem.dirichlet ? src.problem.dirichlet->domain.lo[k]
                                                     : src.start[k] - 1.0;
            const double ohi = src.problem.dirichlet ? src.problem.dirichlet->domain.hi[k]
                                                     : src.start[k] + 1.0;
            x[k] = olo + (ohi - olo) * (0.01 + 0.98 * rng.uniform());
        }
        sde.forward(x, fwd);
        sde.inverse(fwd, back);
        for (int k = 0; k < d; ++k)
            if (std::abs(back[k] - x[k]) > 1e-12 * (1.0 + std::abs(x[k])))
                throw unsupported_problem("lamperti: transform round trip failed");
    }
}

}  // namespace

double ComplementarySde::sigma_diag(const Vec& x, double s, int k) const {
    switch (problem.diffusion.kind) {
        case DiffusionField::Kind::diag_const:
            return problem.diffusion.diag[k];
        case DiffusionField::Kind::scalar_fn:
            return problem.diffusion.sigma1d(x[0], horizon - s);
        case DiffusionField::Kind::matrix_fn:
            break;
    }
    throw unsupported_problem("complementary sde: diagonal volatility required here");
}

double ComplementarySde::a_diag(const Vec& x, double s, int k) const {
    const double sg = sigma_diag(x, s, k);
    return sg * sg;
}

ComplementarySde complementary_sde(const PdeProblem& problem, const Vec& x, double t) {
    problem.validate();
    if (static_cast<int>(x.size()) != problem.dim)
        throw std::invalid_argument("complementary_sde: point dimension mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("complementary_sde: horizon must be > 0");
    if (problem.dirichlet && !problem.dirichlet->domain.strictly_inside(x))
        throw std::invalid_argument("complementary_sde: start point must be inside the domain");
    return ComplementarySde{problem, x, t};
}

UnitVolatilitySde lamperti_transform(const ComplementarySde& sde) {
    return lamperti_transform_with_hooks(sde, std::nullopt);
}

UnitVolatilitySde lamperti_transform_with_hooks(const ComplementarySde& sde,
                                                const std::optional<EaHooks>& hooks) {
    const PdeProblem& pb = sde.problem;
    const int d = pb.dim;
    UnitVolatilitySde out;
    out.dim = d;
    out.horizon = sde.horizon;
    out.time_homogeneous = pb.time_homogeneous;

    const double horizon = sde.horizon;

    if (pb.diffusion.kind == DiffusionField::Kind::matrix_fn)
        throw unsupported_problem(
            "lamperti: a unit-volatility transform for non-diagonal multivariate volatility is "
            "not available");

    if (pb.diffusion.kind == DiffusionField::Kind::diag_const) {
        const std::vector<double> sig = pb.diffusion.diag;
        out.forward = [sig](const Vec& x, Vec& v) {
            for (std::size_t k = 0; k < x.size(); ++k) v[k] = x[k] / sig[k];
        };
        out.inverse = [sig](const Vec& v, Vec& x) {
            for (std::size_t k = 0; k < v.size(); ++k) x[k] = v[k] * sig[k];
        };
        const DriftField drift = pb.drift;
        out.alpha = [sig, drift, horizon](const Vec& v, double s, Vec& a) {
            const std::size_t n = v.size();
            Vec x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = v[k] * sig[k];
            drift.eval(x, horizon - s, a);
            for (std::size_t k = 0; k < n; ++k) a[k] /= sig[k];
        };

        switch (pb.drift.form) {
            case DriftForm::zero:
                out.potential = [](const Vec&, double) { return 0.0; };
                out.phase = [](const Vec&, double) { return 0.0; };
                break;
            case DriftForm::constant: {
                std::vector<double> c(d);
                double phi_c = 0.0;
                for (int k = 0; k < d; ++k) {
                    c[k] = pb.drift.p[k] / sig[k];
                    phi_c += 0.5 * c[k] * c[k];
                }
                out.potential = [c](const Vec& v, double) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < v.size(); ++k) s += c[k] * v[k];
                    return s;
                };
                out.phase = [phi_c](const Vec&, double) { return phi_c; };
                break;
            }
            case DriftForm::grad_exp_bilinear: {
                for (double s : sig)
                    if (s != 1.0)
                        throw unsupported_problem(
                            "lamperti: gradient-form drift requires unit volatility for a "
                            "potential");
                const double s0 = pb.drift.p[0];
                out.potential = [s0](const Vec& v, double) { return std::exp(s0 * v[0] * v[1]); };
                out.phase = [s0](const Vec& v, double) {
                    const double k = std::exp(s0 * v[0] * v[1]);
                    const double r2 = v[0] * v[0] + v[1] * v[1];
                    return 0.5 * s0 * s0 * r2 * (k * k + k);
                };
                break;
            }
            case DriftForm::custom: {
                if (!hooks || !hooks->potential)
                    throw unsupported_problem(
                        "lamperti: custom drift needs a user-supplied potential (grad A = alpha)");
                out.potential = hooks->potential;
                out.phase = hooks->phase;  // may be empty; filled with FD below
                break;
            }
        }
    } else {
        // 1D, state-dependent sigma. The transform integral needs sigma to be
        // time-constant.
        if (d != 1) throw unsupported_problem("lamperti: sigma(x) transforms are 1D only");
        if (!pb.time_homogeneous)
            throw unsupported_problem("lamperti: sigma(x) transform requires time homogeneity");
        auto sig_fn = pb.diffusion.sigma1d;
        const double t_eval = horizon;  // time argument is inert here
        const double x_ref = pb.dirichlet
                                 ? 0.5 * (pb.dirichlet->domain.lo[0] + pb.dirichlet->domain.hi[0])
                                 : sde.start[0];
        auto tr = std::make_shared<NumericTransform1d>(
            [sig_fn, t_eval](double x) { return sig_fn(x, t_eval); }, x_ref);
        out.forward = [tr](const Vec& x, Vec& v) { v[0] = tr->forward(x[0]); };
        out.inverse = [tr](const Vec& v, Vec& x) { x[0] = tr->inverse(v[0]); };
        const DiffusionField diff = pb.diffusion;
        const DriftField drift = pb.drift;
        out.alpha = [tr, diff, drift, horizon](const Vec& v, double s, Vec& a) {
            Vec x(1);
            x[0] = tr->inverse(v[0]);
            drift.eval(x, horizon - s, a);
            a[0] = a[0] / diff.sigma1d(x[0], horizon - s) - 0.5 * diff.dsigma(x[0], horizon - s);
        };
        if (hooks && hooks->potential) {
            out.potential = hooks->potential;
            out.phase = hooks->phase;
        } else if (pb.drift.form == DriftForm::zero) {
            // alpha = -sigma'/2 integrates to -log(sigma)/2 in v.
            out.potential = [tr, diff, horizon](const Vec& v, double) {
                const double x = tr->inverse(v[0]);
                return -0.5 * std::log(diff.sigma1d(x, horizon));
            };
        } else {
            throw unsupported_problem(
                "lamperti: sigma(x) with drift needs a user-supplied potential");
        }
    }

    if (!out.phase) {
        // Fallback: phi = 1/2 (|alpha|^2 + div alpha + 2 dA/ds) by central
        // differences. Captures `self` by value into a small closure copy.
        UnitVolatilitySde probe = out;
        probe.phase = nullptr;
        auto shared = std::make_shared<UnitVolatilitySde>(std::move(probe));
        out.phase = [shared](const Vec& v, double s) { return phase_fd(*shared, v, s); };
    }

    // Start point and domain image.
    out.start.resize(d);
    out.forward(sde.start, out.start);
    if (pb.dirichlet) {
        Vec lo(d), hi(d);
        out.forward(pb.dirichlet->domain.lo, lo);
        out.forward(pb.dirichlet->domain.hi, hi);
        out.domain = Hyperrectangle(lo, hi);
    }

    verify_construction(out, sde);
    return out;
}

double phi(const UnitVolatilitySde& sde, const Vec& v, double s) { return sde.phase(v, s); }

double phi_tilde(const UnitVolatilitySde& sde, const PdeProblem& problem, const Vec& v, double s) {
    return sde.phase(v, s) + problem.kill_checked(sde.to_original(v), sde.horizon - s);
}

double potential_A(const UnitVolatilitySde& sde, const Vec& v, double s) {
    return sde.potential(v, s);
}

namespace {

// Registry bound oracles. Validity matters more than tightness: unsound
// bounds bias the acceptance, loose ones only cost Poisson points.
BoundOracle auto_bounds(const PdeProblem& pb, const UnitVolatilitySde& sde) {
    if (pb.diffusion.kind != DiffusionField::Kind::diag_const) return BoundOracle();
    switch (pb.drift.form) {
        case DriftForm::zero:
            return BoundOracle([](const Hyperrectangle&, double, double) {
                return PhiBounds{0.0, 0.0, 0.0};
            });
        case DriftForm::constant: {
            std::vector<double> c(pb.dim);
            double phi_c = 0.0;
            for (int k = 0; k < pb.dim; ++k) {
                c[k] = pb.drift.p[k] / pb.diffusion.diag[k];
                phi_c += 0.5 * c[k] * c[k];
            }
            return BoundOracle([c, phi_c](const Hyperrectangle& box, double, double) {
                double a_max = 0.0;
                for (std::size_t k = 0; k < c.size(); ++k)
                    a_max += c[k] * (c[k] >= 0.0 ? box.hi[k] : box.lo[k]);
                return PhiBounds{phi_c, phi_c, a_max};
            });
        }
        case DriftForm::grad_exp_bilinear: {
            const double s0 = pb.drift.p[0];
            return BoundOracle([s0](const Hyperrectangle& box, double, double) {
                // phi = s0^2/2 * r^2 * (k^2 + k): bound the factors separately.
                auto sq = [](double v) { return v * v; };
                double r2_min = 0.0, r2_max = 0.0;
                for (int k = 0; k < 2; ++k) {
                    const double m = box.lo[k] <= 0.0 && box.hi[k] >= 0.0
                                         ? 0.0
                                         : std::min(std::abs(box.lo[k]), std::abs(box.hi[k]));
                    r2_min += m * m;
                    r2_max += std::max(sq(box.lo[k]), sq(box.hi[k]));
                }
                double prod_min = box.lo[0] * box.lo[1], prod_max = prod_min;
                for (double u : {box.lo[0] * box.hi[1], box.hi[0] * box.lo[1],
                                 box.hi[0] * box.hi[1]}) {
                    prod_min = std::min(prod_min, u);
                    prod_max = std::max(prod_max, u);
                }
                const double k_min = std::exp(s0 >= 0.0 ? s0 * prod_min : s0 * prod_max);
                const double k_max = std::exp(s0 >= 0.0 ? s0 * prod_max : s0 * prod_min);
                return PhiBounds{0.5 * s0 * s0 * r2_min * (k_min * k_min + k_min),
                                 0.5 * s0 * s0 * r2_max * (k_max * k_max + k_max), k_max};
            });
        }
        case DriftForm::custom:
            break;
    }
    (void)sde;
    return BoundOracle();
}

}  // namespace

EaProblem make_ea(const PdeProblem& problem, const Vec& x, double t,
                  const std::optional<EaHooks>& hooks) {
    ComplementarySde csde = complementary_sde(problem, x, t);
    UnitVolatilitySde sde = lamperti_transform_with_hooks(csde, hooks);
    BoundOracle bounds = (hooks && hooks->bounds) ? BoundOracle(hooks->bounds)
                                                  : auto_bounds(problem, sde);
    if (!bounds.valid())
        throw unsupported_problem(
            "ea: no bound oracle available for this problem (supply box bounds for phi and A)");
    if (sde.domain) {
        // Domain-wide constants for the global-bounds mode.
        bounds.set_global(bounds.get(*sde.domain, 0.0, t));
    }
    return EaProblem{problem, std::move(sde), std::move(bounds)};
}

}  // namespace fkpde

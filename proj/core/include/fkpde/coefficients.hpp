#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkpde/geometry.hpp"

namespace fkpde {

// Coefficient functions are either drawn from a small registry of named
// forms with numeric parameters (cheap switch dispatch, exact derivatives,
// representable in problem files) or are arbitrary callables supplied in
// code. All take (x, t) with t the PDE-side time.

enum class ScalarForm { zero, constant, linear, product, exp_bilinear, custom };

struct ScalarField {
    ScalarForm form = ScalarForm::zero;
    std::vector<double> p;
    std::function<double(const Vec&, double)> fn;

    double operator()(const Vec& x, double t) const {
        switch (form) {
            case ScalarForm::zero:
                return 0.0;
            case ScalarForm::constant:
                return p[0];
            case ScalarForm::linear: {
                double s = p[0];
                for (std::size_t k = 0; k < x.size(); ++k) s += p[k + 1] * x[k];
                return s;
            }
            case ScalarForm::product: {
                double s = 1.0;
                for (double v : x) s *= v;
                return s;
            }
            case ScalarForm::exp_bilinear:
                return std::exp(p[0] * x[0] * x[1]);
            case ScalarForm::custom:
                return fn(x, t);
        }
        return 0.0;
    }

    bool time_dependent() const { return form == ScalarForm::custom; }

    static ScalarField zero() { return {}; }
    static ScalarField constant(double v) { return {ScalarForm::constant, {v}, nullptr}; }
    // c0 + sum_k coef[k] x_k
    static ScalarField linear(double c0, Vec coef) {
        std::vector<double> p{c0};
        p.insert(p.end(), coef.begin(), coef.end());
        return {ScalarForm::linear, std::move(p), nullptr};
    }
    static ScalarField product() { return {ScalarForm::product, {}, nullptr}; }
    static ScalarField exp_bilinear(double s) { return {ScalarForm::exp_bilinear, {s}, nullptr}; }
    static ScalarField custom(std::function<double(const Vec&, double)> f) {
        return {ScalarForm::custom, {}, std::move(f)};
    }
};

enum class DriftForm { zero, constant, grad_exp_bilinear, custom };

struct DriftField {
    DriftForm form = DriftForm::zero;
    std::vector<double> p;
    std::function<void(const Vec&, double, Vec&)> fn;

    void eval(const Vec& x, double t, Vec& out) const {
        switch (form) {
            case DriftForm::zero:
                for (auto& v : out) v = 0.0;
                return;
            case DriftForm::constant:
                for (std::size_t k = 0; k < out.size(); ++k) out[k] = p[k];
                return;
            case DriftForm::grad_exp_bilinear: {
                // gradient of exp(s x1 x2), d = 2
                const double k = std::exp(p[0] * x[0] * x[1]);
                out[0] = p[0] * x[1] * k;
                out[1] = p[0] * x[0] * k;
                return;
            }
            case DriftForm::custom:
                fn(x, t, out);
                return;
        }
    }

    static DriftField zero() { return {}; }
    static DriftField constant(Vec b) { return {DriftForm::constant, std::move(b), nullptr}; }
    static DriftField grad_exp_bilinear(double s) {
        return {DriftForm::grad_exp_bilinear, {s}, nullptr};
    }
    static DriftField custom(std::function<void(const Vec&, double, Vec&)> f) {
        return {DriftForm::custom, {}, std::move(f)};
    }
};

// Volatility of the complementary SDE; the PDE diffusion matrix is
// a = sigma sigma^T. Diagonal forms cover the exact-simulation path; a full
// matrix callable (Cholesky applied per step) is accepted by the Euler path
// only.
struct DiffusionField {
    enum class Kind { diag_const, scalar_fn, matrix_fn };
    Kind kind = Kind::diag_const;
    std::vector<double> diag;                               // diag_const: sigma_k > 0
    std::function<double(double, double)> sigma1d;          // scalar_fn: sigma(x, t), d = 1
    std::function<double(double, double)> dsigma1d;         // optional sigma'(x, t)
    std::function<void(const Vec&, double, std::vector<double>&)> a_fn;  // row-major a(x, t)

    static DiffusionField diag_const(Vec sigma) {
        DiffusionField f;
        f.kind = Kind::diag_const;
        for (double s : sigma)
            if (!(s > 0.0)) throw std::invalid_argument("diffusion: sigma must be > 0");
        f.diag = std::move(sigma);
        return f;
    }
    static DiffusionField scalar_fn(std::function<double(double, double)> s,
                                    std::function<double(double, double)> ds = nullptr) {
        DiffusionField f;
        f.kind = Kind::scalar_fn;
        f.sigma1d = std::move(s);
        f.dsigma1d = std::move(ds);
        return f;
    }
    static DiffusionField matrix_fn(std::function<void(const Vec&, double, std::vector<double>&)> a) {
        DiffusionField f;
        f.kind = Kind::matrix_fn;
        f.a_fn = std::move(a);
        return f;
    }

    // sigma'(x, t) for the 1D scalar case; central difference fallback.
    double dsigma(double x, double t) const {
        if (dsigma1d) return dsigma1d(x, t);
        const double h = 1e-6 * (1.0 + std::abs(x));
        return (sigma1d(x + h, t) - sigma1d(x - h, t)) / (2.0 * h);
    }
};

}  // namespace fkpde

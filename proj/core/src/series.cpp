#include "fkpde/series.hpp"

#include <cmath>

#include "fkpde/errors.hpp"

namespace fkpde::series {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTStar = 0.64;  // series switch point for the unit exit time
constexpr int kMaxTerms = 100000;

// Beyond this the no-exit probabilities are below ~1e-17 of any uniform draw.
constexpr double kHopelessTimeOverK2 = 8.0;

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// Unit-interval exit time
// ---------------------------------------------------------------------------

double fpt_unit_density(double t) {
    if (t <= 0.0) return 0.0;
    double s = 0.0;
    if (t <= kTStar) {
        const double c = std::sqrt(2.0 / (kPi * t * t * t));
        for (int n = 0; n < kMaxTerms; ++n) {
            const double k = 2.0 * n + 1.0;
            const double term = k * std::exp(-k * k / (2.0 * t));
            s += (n % 2 == 0) ? term : -term;
            if (term < 1e-18 * (std::abs(s) + 1e-300) && n > 0) break;
        }
        return c * s;
    }
    for (int n = 0; n < kMaxTerms; ++n) {
        const double k = 2.0 * n + 1.0;
        const double term = k * std::exp(-k * k * kPi * kPi * t / 8.0);
        s += (n % 2 == 0) ? term : -term;
        if (term < 1e-18 * (std::abs(s) + 1e-300)) break;
    }
    return 0.5 * kPi * s;
}

double fpt_unit_cdf(double t) {
    if (t <= 0.0) return 0.0;
    if (t <= kTStar) {
        // Reflection series for the survival probability.
        const double rt = std::sqrt(t);
        double surv = normal_cdf(1.0 / rt) - normal_cdf(-1.0 / rt);
        for (int n = 1; n < kMaxTerms; ++n) {
            const double up = (2.0 * n + 1.0) / rt;
            const double dn = (2.0 * n - 1.0) / rt;
            const double inc = 2.0 * (normal_cdf(up) - normal_cdf(dn));
            surv += (n % 2 == 0) ? inc : -inc;
            if (inc < 1e-18) break;
        }
        return 1.0 - surv;
    }
    double surv = 0.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double k = 2.0 * n + 1.0;
        const double term = std::exp(-k * k * kPi * kPi * t / 8.0) / k;
        surv += (n % 2 == 0) ? term : -term;
        if (term < 1e-18) break;
    }
    return 1.0 - (4.0 / kPi) * surv;
}

namespace {

// Normal tail: sample X >= s from the standard normal, Marsaglia's method.
double normal_tail(RngStream& rng, double s) {
    for (int it = 0; it < 1000000; ++it) {
        const double x = std::sqrt(s * s - 2.0 * std::log(rng.uniform_pos()));
        if (rng.uniform() * x <= s) return x;
    }
    throw internal_error("series: normal tail rejection cap exceeded");
}

// Alternating-series acceptance: accept iff u < 1 - c(1) + c(2) - ...
// Requires the c(m) to be decreasing, which both regimes guarantee.
template <typename Coef>
bool alternating_accept(double u, Coef c) {
    double s = 1.0;
    for (int m = 1; m < kMaxTerms; ++m) {
        s += (m % 2 == 1) ? -c(m) : c(m);
        if (m % 2 == 1 && u <= s) return true;   // below a lower bound
        if (m % 2 == 0 && u >= s) return false;  // above an upper bound
    }
    throw internal_error("series: alternating acceptance stuck");
}

}  // namespace

double sample_fpt_unit(RngStream& rng) {
    // Mixture weights of the two dominating pieces; total mass 1.00068, so
    // the overall rejection rate is ~7e-4.
    static const double mass_head = 4.0 * normal_cdf(-1.0 / std::sqrt(kTStar));
    static const double mass_tail = (4.0 / kPi) * std::exp(-kPi * kPi * kTStar / 8.0);
    static const double p_head = mass_head / (mass_head + mass_tail);

    for (int it = 0; it < 1000000; ++it) {
        double t;
        const double u = rng.uniform();
        if (rng.uniform() < p_head) {
            const double x = normal_tail(rng, 1.0 / std::sqrt(kTStar));
            t = 1.0 / (x * x);
            if (alternating_accept(u, [t](int m) {
                    return (2.0 * m + 1.0) * std::exp(-2.0 * m * (m + 1.0) / t);
                }))
                return t;
        } else {
            t = kTStar + rng.exponential(kPi * kPi / 8.0);
            if (alternating_accept(u, [t](int m) {
                    return (2.0 * m + 1.0) *
                           std::exp(-static_cast<double>(m) * (m + 1.0) * kPi * kPi * t / 2.0);
                }))
                return t;
        }
    }
    throw internal_error("series: exit-time sampler rejection cap exceeded");
}

// ---------------------------------------------------------------------------
// Brownian-bridge / Bessel-bridge barrier probabilities
// ---------------------------------------------------------------------------

namespace {

// Two-barrier no-exit image series for a Brownian bridge alpha -> beta over
// [0,T] with barriers at 0 and K:
//   P = sum_n [ exp(-2nK(nK + beta - alpha)/T) - exp(-2(nK+alpha)(nK+beta)/T) ]
// Partial sums over |n| <= N, with a geometric tail bound.
struct BbInsideSeries {
    double alpha, beta, T, K;

    double partial(int N) const {
        double s = 1.0 - std::exp(-2.0 * alpha * beta / T);  // n = 0
        for (int n = 1; n <= N; ++n) {
            const double nk = n * K;
            s += std::exp(-2.0 * nk * (nk + beta - alpha) / T);
            s += std::exp(-2.0 * nk * (nk - beta + alpha) / T);
            s -= std::exp(-2.0 * (nk + alpha) * (nk + beta) / T);
            s -= std::exp(-2.0 * (nk - alpha) * (nk - beta) / T);
        }
        return s;
    }

    // All four image families at index n are bounded by g(n) = exp(-2K^2(n-1)^2/T).
    double tail(int N) const {
        const double q = 2.0 * K * K / T;
        const double g = std::exp(-q * N * N);  // g(N+1)
        const double r = std::exp(-q * (2.0 * N + 1.0));
        if (r >= 1.0) return 4.0 * kMaxTerms;  // force more terms (cannot happen for q>0)
        return 4.0 * g / (1.0 - r);
    }
};

// Ratio series for the first-passage-anchored Bessel(3) bridge:
//   rho_end = 1 + sum_{m>=1} 2 exp(-2m^2K^2/T) (cosh(z_m) - q_m sinh(z_m)),
// with q_m = 2mK/a and z_m = 2mKa/T. The paired form is stable as a -> 0.
struct Bes3EndSeries {
    double a, T, K;

    // Paired +/-m image terms. Written so no intermediate can overflow:
    //   2 e^{-2m^2K^2/T} (cosh z - q sinh z),  q = 2mK/a, z = 2mKa/T,
    // with q sinh z evaluated as (qz)(sinh z / z) for small a, and the two
    // exponentials split analytically once z is large (both exponents are
    // then non-positive).
    double pair_term(int m) const {
        const double mk = m * K;
        const double z = 2.0 * mk * a / T;
        if (z <= 30.0) {
            const double qz = 4.0 * mk * mk / T;  // q * z, no division by a
            const double sinch = z < 1e-4 ? 1.0 + z * z / 6.0 : std::sinh(z) / z;
            return 2.0 * std::exp(-2.0 * mk * mk / T) * (std::cosh(z) - qz * sinch);
        }
        const double q = 2.0 * mk / a;
        return (1.0 - q) * std::exp(-2.0 * mk * (mk - a) / T) +
               (1.0 + q) * std::exp(-2.0 * mk * (mk + a) / T);
    }

    double partial(int M) const {
        double s = 1.0;
        for (int m = 1; m <= M; ++m) s += pair_term(m);
        return s;
    }

    double tail(int M) const {
        const double q = 2.0 * K * K / T;
        const int m = M + 1;
        const double g = 2.0 * (1.0 + 2.0 * q * m * m) * std::exp(-q * m * (m - 1.0));
        const double r = 4.0 * std::exp(-q * m);
        if (r >= 1.0) return 4.0 * kMaxTerms;
        return g / (1.0 - r);
    }
};

// Decide u < p by refining [partial - tail, partial + tail] / divisor.
template <typename S>
bool bracket_bernoulli(double u, const S& s, double divisor) {
    for (int N = 1; N < kMaxTerms; N += (N < 8 ? 1 : N / 4)) {
        const double mid = s.partial(N) / divisor;
        const double w = s.tail(N) / divisor;
        if (u < mid - w) return true;
        if (u > mid + w) return false;
        if (w < 1e-15) return u < mid;  // bracket exhausted at machine precision
    }
    throw internal_error("series: bracket bernoulli no convergence");
}

template <typename S>
double bracket_value(const S& s, double divisor) {
    for (int N = 1; N < kMaxTerms; N += (N < 8 ? 1 : N / 4)) {
        const double w = s.tail(N);
        const double v = s.partial(N);
        if (w < 1e-15 * (std::abs(v) + 1.0)) return v / divisor;
    }
    throw internal_error("series: bracket value no convergence");
}

}  // namespace

double prob_bb_inside(double a, double b, double T, double lo, double hi) {
    const double K = hi - lo;
    const double alpha = a - lo;
    const double beta = b - lo;
    if (!(alpha > 0.0) || !(beta > 0.0) || !(alpha < K) || !(beta < K)) return 0.0;
    if (T <= 0.0) return 1.0;
    if (T > kHopelessTimeOverK2 * K * K) return 0.0;
    const double v = bracket_value(BbInsideSeries{alpha, beta, T, K}, 1.0);
    return std::fmin(std::fmax(v, 0.0), 1.0);
}

double prob_bes3_below(double a, double c, double T, double K) {
    if (!(a > 0.0) || !(c > 0.0) || a >= K || c >= K) return 0.0;
    if (T <= 0.0) return 1.0;
    if (T > kHopelessTimeOverK2 * K * K) return 0.0;
    const double denom = 1.0 - std::exp(-2.0 * a * c / T);
    const double v = bracket_value(BbInsideSeries{a, c, T, K}, denom);
    return std::fmin(std::fmax(v, 0.0), 1.0);
}

double prob_bes3_end_below(double a, double T, double K) {
    if (!(a > 0.0) || a >= K) return 0.0;
    if (T <= 0.0) return 1.0;
    if (T > kHopelessTimeOverK2 * K * K) return 0.0;
    const double v = bracket_value(Bes3EndSeries{a, T, K}, 1.0);
    return std::fmin(std::fmax(v, 0.0), 1.0);
}

bool bernoulli_bb_inside(RngStream& rng, double a, double b, double T, double lo, double hi) {
    const double K = hi - lo;
    const double alpha = a - lo;
    const double beta = b - lo;
    if (!(alpha > 0.0) || !(beta > 0.0) || !(alpha < K) || !(beta < K)) return false;
    if (T <= 0.0) return true;
    const double u = rng.uniform();
    if (T > kHopelessTimeOverK2 * K * K) return false;
    return bracket_bernoulli(u, BbInsideSeries{alpha, beta, T, K}, 1.0);
}

bool bernoulli_bes3_below(RngStream& rng, double a, double c, double T, double K) {
    if (!(a > 0.0) || !(c > 0.0) || a >= K || c >= K) return false;
    if (T <= 0.0) return true;
    const double u = rng.uniform();
    if (T > kHopelessTimeOverK2 * K * K) return false;
    const double denom = 1.0 - std::exp(-2.0 * a * c / T);
    return bracket_bernoulli(u, BbInsideSeries{a, c, T, K}, denom);
}

bool bernoulli_bes3_end_below(RngStream& rng, double a, double T, double K) {
    if (!(a > 0.0) || a >= K) return false;
    if (T <= 0.0) return true;
    const double u = rng.uniform();
    if (T > kHopelessTimeOverK2 * K * K) return false;
    return bracket_bernoulli(u, Bes3EndSeries{a, T, K}, 1.0);
}

// ---------------------------------------------------------------------------
// Killed kernel on (0, K)
// ---------------------------------------------------------------------------

namespace {

// Image and spectral representations converge from opposite ends; switch
// where both are comfortable.
constexpr double kKernelRegimeSwitch = 0.35;  // in units of T / K^2

double gauss(double z, double T) {
    return std::exp(-z * z / (2.0 * T)) / std::sqrt(2.0 * kPi * T);
}

}  // namespace

double killed_kernel(double a, double v, double T, double K, bool scaled) {
    if (!(a > 0.0) || !(v > 0.0) || a >= K || v >= K) return 0.0;
    const double lambda1 = kPi * kPi / (2.0 * K * K);
    if (T <= kKernelRegimeSwitch * K * K) {
        double s = 0.0;
        for (int n = 0; n < kMaxTerms; ++n) {
            double term;
            if (n == 0) {
                term = gauss(v - a, T) - gauss(v + a, T);
            } else {
                const double nk = 2.0 * n * K;
                term = gauss(v - a + nk, T) - gauss(v + a + nk, T) + gauss(v - a - nk, T) -
                       gauss(v + a - nk, T);
            }
            s += term;
            if (n > 0 && std::abs(term) < 1e-17 * (std::abs(s) + 1e-300)) break;
        }
        return scaled ? s * std::exp(lambda1 * T) : s;
    }
    // Spectral sum, optionally with the slowest mode factored out.
    double s = 0.0;
    for (int n = 1; n < kMaxTerms; ++n) {
        const double decay = (static_cast<double>(n) * n - (scaled ? 1.0 : 0.0)) * lambda1 * T;
        if (decay > 750.0) break;
        const double term = (2.0 / K) * std::sin(n * kPi * a / K) * std::sin(n * kPi * v / K) *
                            std::exp(-decay);
        s += term;
        if (n > 2 && std::abs(term) < 1e-17 * (std::abs(s) + 1e-300)) break;
    }
    return s;
}

double killed_flux0(double v, double T, double K, bool scaled) {
    if (!(v > 0.0) || v >= K) return 0.0;
    const double lambda1 = kPi * kPi / (2.0 * K * K);
    if (T <= kKernelRegimeSwitch * K * K) {
        double s = 0.0;
        for (int n = 0; n < kMaxTerms; ++n) {
            double term;
            if (n == 0) {
                term = v * gauss(v, T);
            } else {
                const double nk = 2.0 * n * K;
                term = (v + nk) * gauss(v + nk, T) + (v - nk) * gauss(v - nk, T);
            }
            s += term;
            if (n > 0 && std::abs(term) < 1e-17 * (std::abs(s) + 1e-300)) break;
        }
        s *= 2.0 / T;
        return scaled ? s * std::exp(lambda1 * T) : s;
    }
    double s = 0.0;
    for (int n = 1; n < kMaxTerms; ++n) {
        const double decay = (static_cast<double>(n) * n - (scaled ? 1.0 : 0.0)) * lambda1 * T;
        if (decay > 750.0) break;
        const double term =
            (2.0 / K) * (n * kPi / K) * std::sin(n * kPi * v / K) * std::exp(-decay);
        s += term;
        if (n > 2 && std::abs(term) < 1e-17 * (std::abs(s) + 1e-300)) break;
    }
    return s;
}

}  // namespace fkpde::series

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "fkpde/rng.hpp"

namespace testsupport {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;       // sample standard deviation
    double se = 0.0;       // standard error of the mean
    std::size_t n = 0;
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.n = xs.size();
    if (m.n == 0) return m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m.n);
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = m.n > 1 ? std::sqrt(ss / static_cast<double>(m.n - 1)) : 0.0;
    m.se = m.n > 1 ? m.sd / std::sqrt(static_cast<double>(m.n)) : 0.0;
    return m;
}

// One-sample Kolmogorov-Smirnov statistic against a cdf.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Two-sample KS statistic.
inline double ks_statistic2(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// KS critical value at significance alpha (asymptotic), one-sample.
inline double ks_critical(std::size_t n, double alpha) {
    const double c = alpha <= 0.01 ? 1.628 : (alpha <= 0.05 ? 1.358 : 1.224);
    return c / std::sqrt(static_cast<double>(n));
}

inline double ks_critical2(std::size_t n, std::size_t m, double alpha) {
    const double c = alpha <= 0.01 ? 1.628 : (alpha <= 0.05 ? 1.358 : 1.224);
    return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

// Adaptive Simpson quadrature, used by the test-side oracles.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 0) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double s = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    const double lc = 0.5 * (a + c), rc = 0.5 * (c + b);
    const double flc = f(lc), frc = f(rc);
    const double s2 = (b - a) / 12.0 * (fa + 4.0 * flc + 2.0 * fc + 4.0 * frc + fb);
    if (depth > 40 || std::abs(s2 - s) < 15.0 * tol) return s2 + (s2 - s) / 15.0;
    return simpson(f, a, c, 0.5 * tol, depth + 1) + simpson(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace testsupport

#pragma once

#include "fkpde/rng.hpp"

namespace fkpde::series {

double normal_cdf(double x);

// First exit time of standard Brownian motion from (-1, 1), started at 0.
// Two rapidly convergent series representations are used, switching at
// t = 0.64: a reflection (image) series for small t and a spectral series
// for large t. Evaluated to near machine precision.
double fpt_unit_density(double t);
double fpt_unit_cdf(double t);

// Exact draw of the unit-interval exit time by alternating-series rejection
// from a two-piece dominating density (inverse-Gaussian-type head, exponential
// tail). Rejection rate is below 1e-3. Exit times for half-width theta follow
// by Brownian scaling: theta^2 * sample.
double sample_fpt_unit(RngStream& rng);

// P(Brownian bridge a -> b over [0,T] stays strictly inside (lo, hi)).
double prob_bb_inside(double a, double b, double T, double lo, double hi);

// P(Bessel(3) bridge a -> c over [0,T] stays below K), with 0 < a, c < K.
// Equals the two-barrier no-exit probability of a (0,K)-killed Brownian
// bridge divided by the one-barrier (kill at 0) probability; the h-transform
// weights cancel in the ratio.
double prob_bes3_below(double a, double c, double T, double K);

// Same with the bridge pinned at 0 at the right endpoint (the first-passage
// anchor). Obtained as the ratio of barrier-flux derivatives; the +/-m image
// terms are combined pairwise (cosh/sinh form) to avoid cancellation when a
// is close to 0.
double prob_bes3_end_below(double a, double T, double K);

// Retrospective Bernoulli draws: one uniform is compared against a partial
// sum bracket [S - tail, S + tail] that tightens as image terms are added,
// so the event is decided exactly without computing the full series.
bool bernoulli_bb_inside(RngStream& rng, double a, double b, double T, double lo, double hi);
bool bernoulli_bes3_below(RngStream& rng, double a, double c, double T, double K);
bool bernoulli_bes3_end_below(RngStream& rng, double a, double T, double K);

// Transition kernel of Brownian motion killed on leaving (0, K), and its
// exit flux into the 0 barrier (lim_{c->0} p(v,c)/c). Image series for
// short times, spectral series for long ones. With `scaled`, the value is
// multiplied by exp(+lambda_1 T) (lambda_1 = pi^2 / 2K^2), which keeps long
// durations away from underflow; the scaling is a duration-only constant,
// so scaled values are still valid unnormalized densities in the spatial
// argument.
double killed_kernel(double a, double v, double T, double K, bool scaled = false);
double killed_flux0(double v, double T, double K, bool scaled = false);

}  // namespace fkpde::series

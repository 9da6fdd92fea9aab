#pragma once

// Closed-form series evaluations for the linear pantograph equation
//   w'(t) = -w(t) + a w(alpha t),  w(0) = w0,
// and for the explosion time S~ = sum_j alpha^{-j} T_j of the unary cascade:
// ring-count PMF, the two series forms of w, the CCDF/PDF of S~, and the
// normalization constant tying them together. These are the analytic oracles
// the stochastic modules are verified against.

#include <stdexcept>

namespace asa::series {

struct SeriesParams {
    double a = 1.0;      // coefficient of the advanced/retarded term
    double alpha = 2.0;  // argument scaling
    double w0 = 1.0;     // initial value
    double tol = 1e-10;  // absolute truncation tolerance
};

// ln 2 / ln alpha (fractal/decay exponent of the binary cascade)
double gamma_exponent(double alpha);
// ln a / ln alpha (decay exponent of the unary solution), a > 0
double gamma_a(double a, double alpha);

// P(N~_ell(t) = n): probability of exactly n rings by time t when ring j
// holds for an Exp(alpha^j * ell) duration. alpha = 1 is the Poisson branch;
// otherwise the non-identical-rates convolution formula, evaluated in
// log-magnitude + sign with compensated summation.
double ring_count_pmf(double ell, double t, int n, double alpha);

// w(t)/w0 via the rearranged single series (requires alpha > max(|a|, 1)):
//   c_{a,alpha} * sum_n a^n e^{-alpha^n t} / prod_{j=1}^n (1 - alpha^j)
double pantograph_series_rearranged(double t, const SeriesParams& p);

// w(t)/w0 via the ring-count double series sum_n a^n P(N~(t) = n), with an
// explicit tail certificate; requires 0 < a <= 1 and (a < 1 or alpha <= 1)
double pantograph_series_double(double t, const SeriesParams& p);

// w(t): dispatches to whichever form is certified for (a, alpha); the alpha=1
// degeneracy collapses to w0 e^{-(1-a)t}. Throws std::domain_error when no
// form applies.
double pantograph_series(double t, const SeriesParams& p);

// G(t) = P(S~ > t) for alpha > 1 and its density g = -G' (term-wise)
double explosion_ccdf(double t, double alpha, double tol);
double explosion_pdf(double t, double alpha, double tol);

// c_{a,alpha} = sum_n a^n / (alpha^n prod_{j=1}^n (1 - alpha^{-j})),
// for alpha > max(|a|, 1); c_const(1, alpha) is the CCDF normalizer
double c_const(double a, double alpha, double tol);

}  // namespace asa::series

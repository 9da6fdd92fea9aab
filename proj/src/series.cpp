#include "asa/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace asa::series {

namespace {

// compensated accumulator: the series below alternate with large terms
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double poisson_pmf(double mean, int n) {
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

}  // namespace

double gamma_exponent(double alpha) {
    if (!(alpha > 0.0) || alpha == 1.0)
        throw std::domain_error("series: gamma_exponent needs alpha > 0, alpha != 1");
    return std::log(2.0) / std::log(alpha);
}

double gamma_a(double a, double alpha) {
    if (!(a > 0.0)) throw std::domain_error("series: gamma_a needs a > 0");
    if (!(alpha > 0.0) || alpha == 1.0)
        throw std::domain_error("series: gamma_a needs alpha > 0, alpha != 1");
    return std::log(a) / std::log(alpha);
}

double ring_count_pmf(double ell, double t, int n, double alpha) {
    if (!(ell > 0.0)) throw std::domain_error("series: ring rate ell must be positive");
    if (!(t >= 0.0)) throw std::domain_error("series: time must be nonnegative");
    if (n < 0) throw std::domain_error("series: ring count must be nonnegative");
    if (!(alpha > 0.0)) throw std::domain_error("series: alpha must be positive");
    if (t == 0.0) return n == 0 ? 1.0 : 0.0;
    if (alpha == 1.0) return poisson_pmf(ell * t, n);
    if (n == 0) return std::exp(-ell * t);

    // log |1 - alpha^d| and its sign for every offset d = j - k in [-n, n]
    const double lna = std::log(alpha);
    std::vector<double> logmag(2 * static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> sign(2 * static_cast<std::size_t>(n) + 1, 1);
    for (int d = -n; d <= n; ++d) {
        if (d == 0) continue;
        const double f = 1.0 - std::exp(d * lna);
        logmag[static_cast<std::size_t>(d + n)] = std::log(std::fabs(f));
        sign[static_cast<std::size_t>(d + n)] = f < 0.0 ? -1 : 1;
    }

    Kahan acc;
    for (int j = 0; j <= n; ++j) {
        const double rate = std::exp(j * lna) * ell;  // alpha^j * ell
        double lm = -rate * t + (j - n) * lna;
        int s = 1;
        for (int k = 0; k <= n; ++k) {
            if (k == j) continue;
            lm -= logmag[static_cast<std::size_t>(j - k + n)];
            s *= sign[static_cast<std::size_t>(j - k + n)];
        }
        if (std::isfinite(lm))
            acc.add(s * std::exp(lm));
        // rate*t overflowing means the term is an exact zero
    }
    return acc.sum;
}

double c_const(double a, double alpha, double tol) {
    if (!(alpha > 1.0) || !(alpha > std::fabs(a)))
        throw std::domain_error("series: c_const needs alpha > max(|a|, 1)");
    if (!(tol > 0.0)) throw std::domain_error("series: tol must be positive");
    Kahan acc;
    acc.add(1.0);
    double term = 1.0;
    for (int n = 1; n < 100000; ++n) {
        term *= (a / alpha) / (1.0 - std::pow(alpha, -n));
        acc.add(term);
        // all later ratios are below q, so the residual is a geometric tail
        const double q = (std::fabs(a) / alpha) / (1.0 - std::pow(alpha, -(n + 1)));
        if (q < 1.0 && std::fabs(term) * q / (1.0 - q) < tol) return acc.sum;
        if (term == 0.0) return acc.sum;
    }
    throw std::runtime_error("series: c_const did not converge");
}

namespace {

// sum_n a^n e^{-alpha^n t} / prod_{j=1}^n (1 - alpha^j), alpha > max(|a|,1).
// Terms follow the ratio recurrence f_n = a e^{-alpha^{n-1}(alpha-1)t}/(1-alpha^n);
// |f_n| -> 0, so truncation is certified once the ratio bound drops below 1/2.
double rearranged_core(double t, double a, double alpha, double tol) {
    Kahan acc;
    double term = std::exp(-t);
    acc.add(term);
    for (int n = 1; n < 100000; ++n) {
        const double decay = (t == 0.0) ? 1.0 : std::exp(-std::pow(alpha, n - 1) * (alpha - 1.0) * t);
        term *= a * decay / (1.0 - std::pow(alpha, n));
        acc.add(term);
        if (term == 0.0) return acc.sum;
        const double next_ratio = std::fabs(a) / (std::pow(alpha, n + 1) - 1.0);
        if (next_ratio < 0.5 && std::fabs(term) * next_ratio / (1.0 - next_ratio) < tol)
            return acc.sum;
    }
    throw std::runtime_error("series: rearranged form did not converge");
}

}  // namespace

double pantograph_series_rearranged(double t, const SeriesParams& p) {
    if (!(t >= 0.0)) throw std::domain_error("series: time must be nonnegative");
    if (!(p.alpha > std::max(std::fabs(p.a), 1.0)))
        throw std::domain_error("series: rearranged form needs alpha > max(|a|, 1)");
    if (!(p.tol > 0.0)) throw std::domain_error("series: tol must be positive");
    const double c = c_const(p.a, p.alpha, p.tol / 8.0);
    const double s = rearranged_core(t, p.a, p.alpha, p.tol / (2.0 * std::fabs(c) + 1.0));
    return p.w0 * c * s;
}

double pantograph_series_double(double t, const SeriesParams& p) {
    if (!(t >= 0.0)) throw std::domain_error("series: time must be nonnegative");
    if (!(p.a > 0.0 && p.a <= 1.0))
        throw std::domain_error("series: double series needs a in (0, 1]");
    if (p.a == 1.0 && p.alpha > 1.0)
        throw std::domain_error("series: no finite tail certificate for a = 1, alpha > 1");
    if (!(p.tol > 0.0)) throw std::domain_error("series: tol must be positive");

    Kahan acc;
    double apow = 1.0;
    for (int n = 0; n < 100000; ++n) {
        acc.add(apow * ring_count_pmf(1.0, t, n, p.alpha));
        // certified tail past n:
        //   a < 1           : sum_{m>n} a^m pmf <= a^{n+1}/(1-a)
        //   a = 1, alpha<1  : P(N~ > n) <= P(alpha^{-n}T_n <= t) = 1-e^{-alpha^n t}
        //   a = 1, alpha=1  : Poisson tail, geometric once n+2 > 2t
        double cert = std::numeric_limits<double>::infinity();
        if (p.a < 1.0) {
            cert = apow * p.a / (1.0 - p.a);
        } else if (p.alpha < 1.0) {
            cert = -std::expm1(-std::pow(p.alpha, n) * t);
        } else {  // a = 1, alpha = 1
            if (n + 2 > 2.0 * t) cert = 2.0 * poisson_pmf(t, n + 1);
        }
        if (cert < p.tol) return p.w0 * acc.sum;
        apow *= p.a;
    }
    throw std::runtime_error("series: double series did not converge");
}

double pantograph_series(double t, const SeriesParams& p) {
    if (!(t >= 0.0)) throw std::domain_error("series: time must be nonnegative");
    if (p.alpha == 1.0) return p.w0 * std::exp(-(1.0 - p.a) * t);  // exact ODE solution
    if (p.alpha > std::max(std::fabs(p.a), 1.0)) return pantograph_series_rearranged(t, p);
    if (p.a > 0.0 && p.a <= 1.0) return pantograph_series_double(t, p);
    throw std::domain_error("series: no certified evaluation for this (a, alpha)");
}

double explosion_ccdf(double t, double alpha, double tol) {
    if (!(alpha > 1.0)) throw std::domain_error("series: explosion requires alpha > 1");
    if (!(t >= 0.0)) throw std::domain_error("series: time must be nonnegative");
    if (!(tol > 0.0)) throw std::domain_error("series: tol must be positive");
    const double c = c_const(1.0, alpha, tol / 4.0);
    return c * rearranged_core(t, 1.0, alpha, tol / (2.0 * c));
}

double explosion_pdf(double t, double alpha, double tol) {
    if (!(alpha > 1.0)) throw std::domain_error("series: explosion requires alpha > 1");
    if (!(t > 0.0)) throw std::domain_error("series: density needs t > 0");
    if (!(tol > 0.0)) throw std::domain_error("series: tol must be positive");
    // term-wise -G': C_alpha * sum_n alpha^n e^{-alpha^n t} / prod_{j=1}^n (1-alpha^j)
    const double c = c_const(1.0, alpha, tol / 8.0);
    Kahan acc;
    double term = std::exp(-t);
    acc.add(term);
    const double inner_tol = tol / (2.0 * c);
    for (int n = 1; n < 100000; ++n) {
        term *= alpha * std::exp(-std::pow(alpha, n - 1) * (alpha - 1.0) * t) /
                (1.0 - std::pow(alpha, n));
        acc.add(term);
        if (term == 0.0) break;
        const double next_ratio = alpha / (std::pow(alpha, n + 1) - 1.0);
        if (next_ratio < 0.5 && std::fabs(term) * next_ratio / (1.0 - next_ratio) < inner_tol)
            break;
    }
    return c * acc.sum;
}

}  // namespace asa::series

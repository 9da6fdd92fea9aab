#include "asa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asa/rng.hpp"

namespace asa::verify {

namespace {

struct Ols {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    bool degenerate = false;  // no spread in x
};

Ols fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    Ols f;
    const std::size_t m = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        f.degenerate = true;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        f.rss += e * e;
    }
    return f;
}

// level with the slope pinned to -gamma: exp(mean of (y + gamma x))
double pinned_level(const std::vector<double>& x, const std::vector<double>& y,
                    double gamma) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += y[i] + gamma * x[i];
    return std::exp(s / static_cast<double>(x.size()));
}

// fixed stream so repeated runs produce identical intervals
constexpr std::uint64_t kBootstrapSeed = 0xB00757A9u;

}  // namespace

RateFit rate_fit(const montecarlo::EstimateTable& u_table, double gamma,
                 double window_lo, double window_hi) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < u_table.nodes.size(); ++i) {
        const double t = u_table.nodes[i];
        if (t < window_lo || t > window_hi || t <= 0.0) continue;
        const double v = 1.0 - u_table.mean[i];
        if (!(v > 3.0 * u_table.std_err[i]) || !(v > 0.0)) continue;
        x.push_back(std::log(t));
        y.push_back(std::log(v));
    }
    if (x.size() < 5)
        throw std::runtime_error(
            "rate fit: fewer than 5 signal-dominated nodes in window");

    RateFit rf;
    rf.window_lo = window_lo;
    rf.window_hi = window_hi;
    rf.nodes_used = static_cast<int>(x.size());
    const Ols base = fit_line(x, y);
    rf.slope = base.slope;
    rf.level = pinned_level(x, y, gamma);

    const int n_boot = 1000;
    std::vector<double> slopes(n_boot), levels(n_boot);
    const std::size_t m = x.size();
    std::vector<double> bx(m), by(m);
    std::uint64_t ctr = 0;
    for (int b = 0; b < n_boot; ++b) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(rng::at(kBootstrapSeed, ctr++) % m);
            bx[i] = x[j];
            by[i] = y[j];
        }
        const Ols f = fit_line(bx, by);
        slopes[b] = f.degenerate ? base.slope : f.slope;
        levels[b] = pinned_level(bx, by, gamma);
    }
    std::sort(slopes.begin(), slopes.end());
    std::sort(levels.begin(), levels.end());
    const int lo_ix = static_cast<int>(0.025 * n_boot);
    const int hi_ix = static_cast<int>(0.975 * n_boot);
    rf.slope_ci = {slopes[lo_ix], slopes[hi_ix]};
    rf.level_ci = {levels[lo_ix], levels[hi_ix]};
    return rf;
}

double tail_slope(const std::vector<double>& samples, double window_lo,
                  double window_hi) {
    if (!(window_hi > window_lo))
        throw std::invalid_argument("tail slope: bad window");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const long above =
        sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), window_lo);
    if (above < 1000)
        throw std::runtime_error("tail slope: insufficient samples above window");

    const int probes = 25;
    std::vector<double> x, y;
    for (int j = 0; j < probes; ++j) {
        const double t = window_lo + (window_hi - window_lo) * j / (probes - 1);
        const long k =
            sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        if (k == 0) continue;
        x.push_back(t);
        y.push_back(std::log(static_cast<double>(k) / n));
    }
    if (x.size() < 2)
        throw std::runtime_error("tail slope: window empties the tail");
    const Ols f = fit_line(x, y);
    if (f.degenerate) throw std::runtime_error("tail slope: degenerate probes");
    return f.slope;
}

DecayClass decay_classify(const montecarlo::EstimateTable& v_table,
                          double gamma) {
    bool all_noise = true;
    for (std::size_t i = 0; i < v_table.nodes.size(); ++i)
        if (std::fabs(v_table.mean[i]) > 3.0 * v_table.std_err[i]) {
            all_noise = false;
            break;
        }
    if (all_noise) return DecayClass::identically_zero;

    std::vector<double> lx, tx, y;
    for (std::size_t i = 0; i < v_table.nodes.size(); ++i) {
        const double t = v_table.nodes[i];
        const double v = v_table.mean[i];
        if (t <= 0.0 || !(v > 3.0 * v_table.std_err[i]) || !(v > 0.0)) continue;
        lx.push_back(std::log(t));
        tx.push_back(t);
        y.push_back(std::log(v));
    }
    if (y.size() < 3) return DecayClass::inconclusive;

    const Ols alg = fit_line(lx, y);   // log v ~ log t
    const Ols expo = fit_line(tx, y);  // log v ~ t
    if (alg.degenerate || expo.degenerate) return DecayClass::inconclusive;
    if (alg.rss < 1e-24 && expo.rss < 1e-24) return DecayClass::inconclusive;
    if (alg.rss * 2.0 <= expo.rss) {
        // a fit far steeper than the reference exponent is not the algebraic
        // regime this classifier certifies
        if (alg.slope < -3.0 * gamma) return DecayClass::inconclusive;
        return DecayClass::algebraic;
    }
    if (expo.rss * 2.0 <= alg.rss) return DecayClass::exponential;
    return DecayClass::inconclusive;
}

std::vector<MatrixCell> ground_state_matrix(
    double alpha, const std::vector<std::pair<double, double>>& cells,
    double t_probe, long n_samples, std::uint64_t seed, int max_n) {
    if (max_n < 1) throw std::invalid_argument("matrix: max_n must be >= 1");
    if (n_samples < 1) throw std::invalid_argument("matrix: need samples");
    if (!(t_probe > 0.0)) throw std::invalid_argument("matrix: t_probe must be positive");
    std::vector<MatrixCell> out;
    out.reserve(cells.size());
    for (const auto& [u0, delta] : cells) {
        const processes::GroundState ground = processes::GroundState::constant(delta);
        // plain sums, not Welford: diverging cells overflow to inf and the
        // mean must stay inf rather than degrade to NaN
        std::vector<long double> sums(static_cast<std::size_t>(max_n) + 1, 0.0L);
        for (long k = 0; k < n_samples; ++k) {
            cascade::CascadeParams p;
            p.alpha = alpha;
            p.seed = rng::derive(seed, static_cast<std::uint64_t>(k));
            p.max_depth = max_n;
            const cascade::CascadeRealization r(p);
            for (int n = 1; n <= max_n; ++n)
                sums[static_cast<std::size_t>(n)] +=
                    processes::multiplicative_iterate(r, ground, u0, n, t_probe);
        }
        MatrixCell cell;
        cell.u0 = u0;
        cell.delta = delta;
        cell.generations = max_n;
        double running_max = 0.0;
        for (int n = 1; n <= max_n; ++n)
            running_max = std::max(
                running_max, static_cast<double>(sums[static_cast<std::size_t>(n)] /
                                                 n_samples));
        cell.final_mean = static_cast<double>(
            sums[static_cast<std::size_t>(max_n)] / n_samples);
        if (running_max > 1e6)
            cell.verdict = CellVerdict::diverging;
        else if (cell.final_mean <= 0.05)
            cell.verdict = CellVerdict::to_zero;
        else if (std::fabs(cell.final_mean - 1.0) <= 0.05)
            cell.verdict = CellVerdict::to_one;
        else
            cell.verdict = CellVerdict::bounded_other;
        out.push_back(cell);
    }
    return out;
}

}  // namespace asa::verify

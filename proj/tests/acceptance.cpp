// Acceptance gate: one check per numbered criterion, each printing a single
// "C<k> PASS/FAIL: detail" line. Run with no arguments for all criteria or
// with a criterion number to run just that one. Exit code 0 only if every
// executed criterion passed.
//
// Checks combine exact identities, analytic-oracle comparisons, and
// fixed-seed Monte Carlo with stated tolerances; every sampler is
// deterministic, so failures reproduce exactly.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "asa/cascade.hpp"
#include "asa/montecarlo.hpp"
#include "asa/picard.hpp"
#include "asa/processes.hpp"
#include "asa/rng.hpp"
#include "asa/series.hpp"
#include "asa/verify.hpp"

using namespace asa;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

std::vector<double> geomspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double span = std::log(hi / lo);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::exp(span * i / (n - 1));
    out.back() = hi;
    return out;
}

cascade::CascadeRealization make(double alpha, std::uint64_t seed, int depth) {
    cascade::CascadeParams p;
    p.alpha = alpha;
    p.seed = seed;
    p.max_depth = depth;
    return cascade::CascadeRealization(p);
}

bool ulp_close(double a, double b, double ulps) {
    if (a == b) return true;
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) <=
           ulps * scale * std::numeric_limits<double>::epsilon();
}

std::string fmtd(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

std::string csv_of(const montecarlo::EstimateTable& t) {
    std::ostringstream os;
    t.write_csv(os);
    return os.str();
}

// ---------------------------------------------------------------------------

// steady state of the linear delay equation at a = 1: identically one
Outcome c1() {
    double worst = 0.0;
    for (double alpha : {0.5, 1.0}) {
        series::SeriesParams p;
        p.a = 1.0;
        p.alpha = alpha;
        p.w0 = 1.0;
        p.tol = 1e-12;
        for (double t : linspace(0.0, 10.0, 50))
            worst = std::max(worst,
                             std::fabs(series::pantograph_series(t, p) - 1.0));
    }
    return {worst <= 1e-8,
            fmtd("max |w - 1| = %.3g over alpha in {0.5, 1} on [0, 10] "
                 "(tolerance 1e-8)",
                 worst)};
}

// single-path explosion-time CCDF: series vs truncated-sum Monte Carlo
Outcome c2() {
    const double alpha = 3.0;
    const long n = 100000;
    const int k_trunc = 60;
    const std::uint64_t seed = 202;
    const auto nodes = linspace(0.2, 6.0, 20);
    std::vector<long> above(nodes.size(), 0);
    for (long k = 0; k < n; ++k) {
        const double s =
            processes::unary_explosion_sample(
                rng::derive(seed, static_cast<std::uint64_t>(k)), alpha,
                k_trunc)
                .s_lower;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (s > nodes[i]) ++above[i];
    }
    double worst_excess = -1e9;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double g = series::explosion_ccdf(nodes[i], alpha, 1e-12);
        const double phat = static_cast<double>(above[i]) / n;
        const double se = std::sqrt(phat * (1.0 - phat) / n);
        const double excess = std::fabs(phat - g) - (4.0 * se + 1e-6);
        worst_excess = std::max(worst_excess, excess);
    }
    return {worst_excess <= 0.0,
            fmtd("20 nodes on [0.2, 6], N=%ld: worst |MC - series| minus "
                 "(4 se + 1e-6) = %.3g",
                 n, worst_excess)};
}

// ring-count probabilities vs brute-force frequencies, plus mass totals
Outcome c3() {
    const double alpha = 3.0;
    const long n = 1000000;
    const std::uint64_t seed = 303;
    long counts[5] = {0, 0, 0, 0, 0};  // rings 0..3, >=4
    for (long k = 0; k < n; ++k) {
        const std::uint64_t s = rng::derive(seed, static_cast<std::uint64_t>(k));
        double total = 0.0, scale = 1.0;
        int rings = 0;
        while (rings < 4) {
            total += scale * rng::exp1(rng::at(s, static_cast<std::uint64_t>(rings)));
            if (total > 1.0) break;
            ++rings;
            scale /= alpha;
        }
        ++counts[rings];
    }
    double worst_z = 0.0;
    for (int r = 0; r <= 3; ++r) {
        const double pmf = series::ring_count_pmf(1.0, 1.0, r, alpha);
        const double phat = static_cast<double>(counts[r]) / n;
        const double se = std::sqrt(pmf * (1.0 - pmf) / n);
        worst_z = std::max(worst_z, std::fabs(phat - pmf) / se);
    }
    double partial = 0.0;
    for (int r = 0; r <= 40; ++r)
        partial += series::ring_count_pmf(1.0, 1.0, r, alpha);
    const double g1 = series::explosion_ccdf(1.0, alpha, 1e-12);
    const bool mass_ok = std::fabs(partial - g1) <= 1e-6;
    return {worst_z <= 3.0 && mass_ok,
            fmtd("pmf(0..3) worst |z| = %.2f (limit 3), partial mass - "
                 "survival = %.2g (limit 1e-6)",
                 worst_z, partial - g1)};
}

// cut-size identity on complete cuts and the closed form of the
// constant-ground iterate, across 1000 realizations per alpha
Outcome c4() {
    const double u0 = 0.35, delta = 0.85;
    long cuts = 0, complete = 0;
    for (double alpha : {1.4, 3.0}) {
        for (std::uint64_t k = 0; k < 1000; ++k) {
            const auto r = make(alpha, rng::derive(404, k), 8);
            for (double t : {0.2, 0.4, 0.8}) {
                const auto cut = cascade::tree_cut(r, t);
                ++cuts;
                if (cut.complete) {
                    ++complete;
                    if (cut.leaves.size() != cut.internal.size() + 1)
                        return {false,
                                fmtd("cut size identity broken at alpha=%g "
                                     "seed=%llu t=%g",
                                     alpha, (unsigned long long)k, t)};
                }
            }
            for (int gen : {1, 4, 8}) {
                for (double t : {0.3, 1.1}) {
                    const auto counts = processes::count_cut(r, gen, t);
                    const double direct =
                        std::pow(u0, static_cast<double>(counts.cut_leaves)) *
                        std::pow(delta,
                                 static_cast<double>(counts.reached_slots));
                    const double x = processes::multiplicative_iterate(
                        r, processes::GroundState::constant(delta), u0, gen, t);
                    if (!ulp_close(x, direct, 8.0))
                        return {false,
                                fmtd("iterate/closed-form mismatch at "
                                     "alpha=%g seed=%llu n=%d t=%g",
                                     alpha, (unsigned long long)k, gen, t)};
                }
            }
        }
    }
    return {true, fmtd("2000 realizations, %ld/%ld cuts complete; all "
                       "identities exact to 8 ulp",
                       complete, cuts)};
}

// at alpha = 1 the extreme solution is the logistic curve
Outcome c5() {
    const double u0 = 0.5;
    processes::ProcessSpec spec;
    spec.equation = processes::Equation::riccati;
    spec.alpha = 1.0;
    spec.ground = processes::GroundState::constant(1.0);
    spec.u0_or_w0 = 1.0;
    spec.generations = 1;
    spec.transform = processes::Transform::product_with_maximal(u0);
    spec.max_depth = 30;
    const auto grid = montecarlo::build_grid({{0.0, 4.0, 21}});
    const auto table =
        montecarlo::estimate_expectation(spec, grid, 10000, 505);

    double max_se = 0.0, worst_match = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        max_se = std::max(max_se, table.std_err[i]);
        const double t = grid.nodes[i];
        const double exact = u0 / (u0 + (1.0 - u0) * std::exp(t));
        const double slack = 4.0 * table.std_err[i] + 1e-12;
        worst_match =
            std::max(worst_match, std::fabs(table.mean[i] - exact) - slack);
    }
    const picard::GridFunction u_hat(grid.nodes, table.mean, u0, {});
    const double res =
        picard::residual_riccati(u_hat, 1.0, u0, linspace(0.0, 4.0, 41));
    const double res_limit = 3.0 * max_se + 1e-4;
    return {res <= res_limit && worst_match <= 0.0,
            fmtd("equation residual %.3g (limit %.3g); worst |mean - "
                 "logistic| beyond 4 se = %.3g",
                 res, res_limit, worst_match)};
}

// algebraic decay of the single-path estimator and agreement with the
// deterministic table
Outcome c6() {
    const double a = 2.0, alpha = 3.0;
    const double ga = series::gamma_a(a, alpha);
    const auto far = montecarlo::build_grid({{12.0, 50.0, 8}, {50.0, 100.0, 4}, {100.0, 200.0, 4}});
    const auto fam_far = montecarlo::estimate_eta_family(
        alpha, a, far, {100000, 100000, 100000}, 606);
    double worst_ratio_lo = 1.0, worst_ratio_hi = 1.0;
    for (double t : {50.0, 100.0, 200.0}) {
        double mean = 0.0;
        bool found = false;
        for (std::size_t i = 0; i < far.nodes.size(); ++i)
            if (far.nodes[i] == t) {
                mean = fam_far.eta.mean[i];
                found = true;
            }
        if (!found) return {false, fmtd("grid missed the probe t=%g", t)};
        const double ratio = mean * std::pow(t, ga);
        worst_ratio_lo = std::min(worst_ratio_lo, ratio);
        worst_ratio_hi = std::max(worst_ratio_hi, ratio);
    }
    const bool tail_ok = worst_ratio_lo >= 0.85 && worst_ratio_hi <= 1.15;

    // the integrand has a soft singularity, so small budgets can undershoot
    // by more than their reported stderr suggests; 1e5 per range keeps the
    // sampling error inside the 0.02 floor
    const auto near =
        montecarlo::build_grid(montecarlo::GridPreset::pantograph_71);
    const auto fam_near = montecarlo::estimate_eta_family(
        alpha, a, near, {100000, 100000, 100000}, 607);
    const auto eta =
        picard::eta_table(a, alpha, 12, geomspace(0.02, 60.0, 90));
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < near.nodes.size(); ++i) {
        const double t = near.nodes[i];
        if (t < 0.5 || t > 12.0) continue;
        const double tol = std::max(3.0 * fam_near.eta.std_err[i], 0.02);
        worst_gap = std::max(
            worst_gap, std::fabs(fam_near.eta.mean[i] - eta(t)) - tol);
    }
    return {tail_ok && worst_gap <= 0.0,
            fmtd("eta(t) t^gamma_a in [%.3f, %.3f] at t in {50,100,200} "
                 "(limits [0.85, 1.15]); table-vs-MC worst excess %.3g on "
                 "[0.5, 12]",
                 worst_ratio_lo, worst_ratio_hi, worst_gap)};
}

// generation means: constant for the additive iterates on a near-solution
// table, nonincreasing for the certified cutoff ground
Outcome c7() {
    const double alpha3 = 3.0;
    const auto eta =
        picard::eta_table(2.0, alpha3, 12, geomspace(0.02, 60.0, 90));
    const auto grid_m = montecarlo::build_grid({{0.5, 3.0, 3}});
    std::vector<montecarlo::EstimateTable> gens;
    for (int n = 1; n <= 6; ++n) {
        processes::ProcessSpec spec;
        spec.equation = processes::Equation::pantograph;
        spec.alpha = alpha3;
        spec.ground = processes::GroundState::tabulated(eta);
        spec.generations = n;
        spec.max_depth = n;
        gens.push_back(
            montecarlo::estimate_expectation(spec, grid_m, 4000, 707));
    }
    double worst_drift = 0.0;
    for (std::size_t n = 1; n < gens.size(); ++n)
        for (std::size_t i = 0; i < grid_m.nodes.size(); ++i) {
            const double slack =
                3.0 * std::hypot(gens[n].std_err[i], gens[0].std_err[i]);
            worst_drift = std::max(
                worst_drift,
                std::fabs(gens[n].mean[i] - gens[0].mean[i]) - slack);
        }

    const double alpha14 = 1.4;
    const double gamma = series::gamma_exponent(alpha14);
    const auto grid_s = montecarlo::build_grid({{10.0, 40.0, 3}});
    std::vector<montecarlo::EstimateTable> rhos;
    for (int n = 1; n <= 6; ++n) {
        processes::ProcessSpec spec;
        spec.equation = processes::Equation::riccati;
        spec.alpha = alpha14;
        spec.ground = processes::GroundState::rho(10.0, 4.0, gamma);
        spec.u0_or_w0 = 1.0;
        spec.generations = n;
        spec.max_depth = n;
        rhos.push_back(
            montecarlo::estimate_expectation(spec, grid_s, 2000, 708));
    }
    double worst_rise = -1e9;
    for (std::size_t n = 1; n < rhos.size(); ++n)
        for (std::size_t i = 0; i < grid_s.nodes.size(); ++i) {
            const double slack =
                2.0 * std::hypot(rhos[n].std_err[i], rhos[n - 1].std_err[i]);
            worst_rise = std::max(
                worst_rise, rhos[n].mean[i] - rhos[n - 1].mean[i] - slack);
        }
    return {worst_drift <= 0.0 && worst_rise <= 0.0,
            fmtd("additive means drift beyond 3 se by %.3g (n <= 6); cutoff "
                 "means rise beyond 2 se by %.3g",
                 worst_drift, worst_rise)};
}

// decay-rate reproduction for alpha = 3: exponential transforms of the
// additive iterate over the 2-step decay table
Outcome c8() {
    const double alpha = 3.0;
    const double gamma = series::gamma_exponent(alpha);
    processes::ProcessSpec base;
    base.equation = processes::Equation::pantograph;
    base.alpha = alpha;
    base.ground = processes::GroundState::tabulated(
        picard::eta_table(2.0, alpha, 2, geomspace(0.02, 60.0, 90)));
    base.generations = 10;
    base.max_depth = 10;
    base.transform = processes::Transform::exponential(1.0);
    const std::vector<double> lambdas = {0.5, 1.0, 3.0};
    const auto grid = montecarlo::build_grid(montecarlo::GridPreset::riccati_72);
    const auto tables =
        montecarlo::estimate_u_lambda_family(base, lambdas, grid, 2000, 808);
    std::string detail;
    bool ok = true;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const auto fit = verify::rate_fit(tables[l], gamma, 11.0, 111.0);
        const double level_ratio = fit.level / lambdas[l];
        const double slope_err = std::fabs(fit.slope + gamma);
        ok = ok && level_ratio >= 0.8 && level_ratio <= 1.2 &&
             slope_err <= 0.08;
        detail += fmtd("%slambda=%g: level/lambda=%.3f slope=%.3f",
                       l ? "; " : "", lambdas[l], level_ratio, fit.slope);
    }
    return {ok, detail + fmtd(" (want level ratio in [0.8, 1.2], slope "
                              "within 0.08 of %.3f)",
                              -gamma)};
}

// decay-rate reproduction for alpha = 1.4: power transforms over the
// certified cutoff ground, plus the exact pathwise ordering
Outcome c9() {
    const double alpha = 1.4, m = 10.0, delta = 4.0;
    const double gamma = series::gamma_exponent(alpha);
    processes::ProcessSpec base;
    base.equation = processes::Equation::riccati;
    base.alpha = alpha;
    base.ground = processes::GroundState::rho(m, delta, gamma);
    base.u0_or_w0 = 1.0;
    base.generations = 10;
    base.max_depth = 10;
    base.transform = processes::Transform::power(1.0);
    const std::vector<double> lambdas = {0.5, 1.0, 3.0};
    const auto grid = montecarlo::build_grid(montecarlo::GridPreset::riccati_72);
    const auto tables =
        montecarlo::estimate_u_lambda_family(base, lambdas, grid, 200, 909);
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        if (!(tables[0].mean[i] >= tables[1].mean[i] &&
              tables[1].mean[i] >= tables[2].mean[i]))
            return {false, fmtd("shared-realization ordering broken at "
                                "t=%g",
                                grid.nodes[i])};
    // fit on the upper third of the log-range: the decay law is a t -> inf
    // statement and the mean path time (~3.4) still inflates 1 - u by a
    // factor (1 - 3.4/t)^{-gamma} lower down, ~2x at t = 11
    std::string detail = "ordering exact at every node";
    bool ok = true;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const auto fit = verify::rate_fit(tables[l], gamma, 40.0, 111.0);
        const double ratio = fit.level / (lambdas[l] * delta);
        ok = ok && ratio >= 0.7 && ratio <= 1.3;
        detail += fmtd("; lambda=%g level/(lambda delta)=%.3f (%d nodes)",
                       lambdas[l], ratio, fit.nodes_used);
    }
    return {ok, detail + " on window [40, 111] (want ratios in [0.7, 1.3])"};
}

// exponential upper tails of the explosion and full-occupation times
Outcome c10() {
    const double alpha = 3.0;
    const long n = 100000;
    std::vector<double> s_times, l_times;
    s_times.reserve(static_cast<std::size_t>(n));
    l_times.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k)
        s_times.push_back(
            processes::unary_explosion_sample(
                rng::derive(1010, static_cast<std::uint64_t>(k)), alpha, 60)
                .s_lower);
    for (long k = 0; k < n; ++k)
        l_times.push_back(cascade::truncated_max_theta(
            make(alpha, rng::derive(1011, static_cast<std::uint64_t>(k)), 30)));
    const double s_slope = verify::tail_slope(s_times, 3.0, 8.0);
    const double l_slope = verify::tail_slope(l_times, 3.0, 8.0);
    const bool ok = s_slope >= -1.35 && s_slope <= -0.75 &&
                    l_slope >= -1.35 && l_slope <= -0.75;
    return {ok, fmtd("log-CCDF slopes on [3, 8]: explosion %.3f, "
                     "full-occupation %.3f (want within [-1.35, -0.75])",
                     s_slope, l_slope)};
}

// certified-early-explosion realizations almost always contain a
// certified hyperexplosive subtree
Outcome c11() {
    const double alpha = 3.0, t = 2.0, eps = 1e-4;
    long eligible = 0, hits = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const auto r = make(alpha, rng::derive(1111, k), 30);
        if (!(cascade::extreme_bounds(r, eps).s_upper <= t)) continue;
        ++eligible;
        if (!cascade::detect_hyperexplosive(r, t, eps).empty()) ++hits;
    }
    const double rate =
        eligible > 0 ? static_cast<double>(hits) / eligible : 0.0;
    return {eligible > 0 && rate >= 0.9,
            fmtd("%ld/%ld certified-early realizations contain a detected "
                 "subtree (%.1f%%, want >= 90%%)",
                 hits, eligible, 100.0 * rate)};
}

// long-time verdicts of the constant-ground iterate means
Outcome c12() {
    const auto low = verify::ground_state_matrix(0.5, {{0.5, 0.5}}, 20.0, 400,
                                                 1212, 12);
    const auto high = verify::ground_state_matrix(
        3.0, {{0.0, 1.0}, {0.5, 2.0}}, 20.0, 400, 1213, 12);
    const bool ok = low[0].verdict == verify::CellVerdict::to_zero &&
                    high[0].verdict == verify::CellVerdict::to_one &&
                    high[1].verdict == verify::CellVerdict::diverging;
    auto name = [](verify::CellVerdict v) {
        switch (v) {
            case verify::CellVerdict::to_zero: return "to_zero";
            case verify::CellVerdict::to_one: return "to_one";
            case verify::CellVerdict::diverging: return "diverging";
            case verify::CellVerdict::bounded_other: return "bounded_other";
        }
        return "?";
    };
    return {ok, fmtd("alpha=0.5 (0.5, 0.5) -> %s; alpha=3 (0, 1) -> %s, "
                     "(0.5, 2) -> %s",
                     name(low[0].verdict), name(high[0].verdict),
                     name(high[1].verdict))};
}

// byte-identical estimator output for any worker count
Outcome c13() {
    processes::ProcessSpec logistic;
    logistic.equation = processes::Equation::riccati;
    logistic.alpha = 1.0;
    logistic.ground = processes::GroundState::constant(1.0);
    logistic.u0_or_w0 = 1.0;
    logistic.generations = 1;
    logistic.transform = processes::Transform::product_with_maximal(0.5);
    logistic.max_depth = 30;
    const auto grid5 = montecarlo::build_grid({{0.0, 4.0, 21}});

    processes::ProcessSpec power;
    power.equation = processes::Equation::riccati;
    power.alpha = 1.4;
    power.ground = processes::GroundState::rho(
        10.0, 4.0, series::gamma_exponent(1.4));
    power.u0_or_w0 = 1.0;
    power.generations = 10;
    power.max_depth = 10;
    power.transform = processes::Transform::power(1.0);
    const auto grid72 =
        montecarlo::build_grid(montecarlo::GridPreset::riccati_72);
    const auto grid71 =
        montecarlo::build_grid(montecarlo::GridPreset::pantograph_71);

    int families = 0;
    for (int workers : {3, 8}) {
        if (csv_of(montecarlo::estimate_expectation(logistic, grid5, 2000,
                                                    1313, 1)) !=
            csv_of(montecarlo::estimate_expectation(logistic, grid5, 2000,
                                                    1313, workers)))
            return {false, fmtd("expectation table differs at %d workers",
                                workers)};
        const auto a = montecarlo::estimate_u_lambda_family(
            power, {0.5, 1.0, 3.0}, grid72, 200, 1314, 1);
        const auto b = montecarlo::estimate_u_lambda_family(
            power, {0.5, 1.0, 3.0}, grid72, 200, 1314, workers);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (csv_of(a[i]) != csv_of(b[i]))
                return {false,
                        fmtd("family table %zu differs at %d workers", i,
                             workers)};
        const auto ea = montecarlo::estimate_eta_family(
            3.0, 2.0, grid71, {2000, 1000, 500}, 1315, 15, 6, 1);
        const auto eb = montecarlo::estimate_eta_family(
            3.0, 2.0, grid71, {2000, 1000, 500}, 1315, 15, 6, workers);
        if (csv_of(ea.eta) != csv_of(eb.eta) ||
            csv_of(ea.eta_prime) != csv_of(eb.eta_prime) ||
            csv_of(ea.eta_sum) != csv_of(eb.eta_sum))
            return {false,
                    fmtd("decay-family tables differ at %d workers", workers)};
        families = 5;
    }
    return {true, fmtd("%d table families byte-identical across worker "
                       "counts {1, 3, 8}",
                       families)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, Outcome (*)()> checks = {
        {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7},
        {8, c8}, {9, c9}, {10, c10}, {11, c11}, {12, c12}, {13, c13}};
    int lo = 1, hi = 13;
    if (argc >= 2) {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > 13) {
            std::fprintf(stderr, "usage: %s [criterion 1..13]\n", argv[0]);
            return 2;
        }
        lo = hi = k;
    }
    bool all_pass = true;
    for (int k = lo; k <= hi; ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = checks.at(k)();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("C%d %s: %s [%.1fs]\n", k, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}

#pragma once

// Statistical checks applied to estimate tables: algebraic-rate fits,
// exponential tail slopes, decay classification, and the long-time
// behavior matrix of the constant-ground iterates.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asa/montecarlo.hpp"

namespace asa::verify {

// Fit of 1 - u(t) ~ level * t^{-gamma} over a time window, using only
// signal-dominated nodes (1 - mean > 3 stderr). slope is the free log-log
// least-squares slope; level is fitted with the slope pinned to -gamma.
// Confidence intervals are percentile bootstrap over nodes.
struct RateFit {
    double slope = 0.0;
    double level = 0.0;
    std::array<double, 2> slope_ci{0.0, 0.0};
    std::array<double, 2> level_ci{0.0, 0.0};
    double window_lo = 0.0;
    double window_hi = 0.0;
    int nodes_used = 0;
};
// Throws std::runtime_error when fewer than 5 signal-dominated nodes fall
// inside the window.
RateFit rate_fit(const montecarlo::EstimateTable& u_table, double gamma,
                 double window_lo, double window_hi);

// Least-squares slope of log(empirical CCDF) against t at evenly spaced
// probe points in [window_lo, window_hi]. Requires at least 1000 samples
// above window_lo, else throws.
double tail_slope(const std::vector<double>& samples, double window_lo,
                  double window_hi);

enum class DecayClass { algebraic, exponential, identically_zero, inconclusive };

// Classifies a table of nonnegative values v(t) (typically 1 - u): noise
// everywhere -> identically_zero; otherwise compares log-log vs semi-log
// least-squares fits on signal nodes and requires a factor-2 residual
// advantage to call a class. gamma anchors the algebraic verdict: fits
// steeper than 3*gamma are not accepted as algebraic.
DecayClass decay_classify(const montecarlo::EstimateTable& v_table,
                          double gamma);

enum class CellVerdict { to_zero, to_one, diverging, bounded_other };

struct MatrixCell {
    double u0 = 0.0;
    double delta = 0.0;
    CellVerdict verdict = CellVerdict::bounded_other;
    double final_mean = 0.0;  // mean of the deepest iterate
    int generations = 0;
};

// Long-time fate of the constant-ground iterate for each (u0, delta) cell:
// estimates E[X_n(t_probe)] for n = 1..max_n on shared realizations, then
// calls to_zero (final mean <= 0.05), to_one (within 0.05 of 1), diverging
// (running max over n exceeds 1e6), or bounded_other.
std::vector<MatrixCell> ground_state_matrix(
    double alpha, const std::vector<std::pair<double, double>>& cells,
    double t_probe, long n_samples, std::uint64_t seed, int max_n = 12);

}  // namespace asa::verify

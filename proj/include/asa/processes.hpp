#pragma once

// Stochastic processes built on cascade realizations whose expectations
// solve (or bound) the two delay equations: multiplicative and additive
// generation-n iterates, minimal/maximal solutions, transformed families,
// and the single-path (unary) samplers. Everything here is deterministic
// given a realization / seed, so estimators built on top are reproducible.

#include <cstdint>

#include "asa/cascade.hpp"
#include "asa/grid_function.hpp"

namespace asa::processes {

// Ground state: the generation-n payoff function fed into the iterates.
// Grounds used in pure-product form must equal 1 at nonpositive arguments
// (constant-1, rho); grounds that vanish there (athreya_mu, athreya_ga,
// tabulated with left_value 0) pair with the u0-at-leaves recursion.
struct GroundState {
    enum class Kind { constant, rho, athreya_mu, athreya_ga, tabulated };
    Kind kind = Kind::constant;
    double delta = 0.0;   // constant value, or cutoff coefficient
    double m = 0.0;       // rho threshold
    double gamma = 0.0;   // algebraic-decay exponent where one applies
    picard::GridFunction table;

    // delta everywhere
    static GroundState constant(double delta);
    // 1 for t <= m, 1 - delta t^{-gamma} beyond; pair with an admissible
    // delta (see admissible_delta) for the contraction/supermartingale use
    static GroundState rho(double m, double delta, double gamma);
    // exp(-t^{-gamma}) for t > 0, 0 otherwise
    static GroundState athreya_mu(double gamma);
    // exp(-t^{-gamma}) (1 + gamma t^{-(gamma+1)}) for t > 0, 0 otherwise
    static GroundState athreya_ga(double gamma);
    // tabulated function (e.g. an eta_table iterate)
    static GroundState tabulated(picard::GridFunction table);

    double operator()(double t) const;
};

// Pointwise transform applied to the raw iterate value.
struct Transform {
    enum class Kind { none, exponential, power, product_with_maximal };
    Kind kind = Kind::none;
    double lambda = 1.0;
    double u0 = 1.0;  // initial value of the maximal factor

    static Transform none();
    static Transform exponential(double lambda);  // x -> e^{-lambda x}, lambda >= 0
    static Transform power(double lambda);        // x -> x^lambda, x >= 0 required
    static Transform product_with_maximal(double u0);  // x -> x * u0^{|cut(t)|}
};

// exponential/power use only x; product_with_maximal multiplies by the
// caller-computed maximal factor.
double apply_transform(double x, const Transform& tr,
                       double maximal_factor = 1.0);

enum class Equation { pantograph, riccati };

struct ProcessSpec {
    Equation equation = Equation::riccati;
    double alpha = 2.0;
    double a = 2.0;        // branching weight (pantograph only)
    GroundState ground = GroundState::constant(0.0);
    double u0_or_w0 = 1.0;
    int generations = 1;   // iterate depth n (0 = the ground state itself)
    Transform transform = Transform::none();
    int max_depth = 30;    // cascade realization depth when sampling
};

// Depth-n alive/dead walk tallies: cut_leaves = vertices at generation < n
// that died while their parent was alive (root counts if it died itself);
// reached_slots = children of alive generation-(n-1) vertices.
struct CutCounts {
    long cut_leaves = 0;
    long reached_slots = 0;
};
CutCounts count_cut(const cascade::CascadeRealization& r, int n, double t);

// X_n(t) = u0^{cut_leaves} * prod over reached slots of
// ground(alpha^n (t - theta_parent)). For grounds that are 1 at nonpositive
// arguments and u0 = 1 this coincides with the all-vertices product form
// prod_{|v|=n-1} ground(alpha^n (t - theta_v))^2. n = 0 returns ground(t).
double multiplicative_iterate(const cascade::CascadeRealization& r,
                              const GroundState& ground, double u0, int n,
                              double t);

// Sum over generation-(n-1) vertices v of 2 * eta(alpha^n (t - theta_v));
// requires eta.left_value == 0 so dead subtrees contribute nothing.
// n = 0 returns eta(t).
double additive_iterate(const cascade::CascadeRealization& r,
                        const picard::GridFunction& eta, int n, double t);

// u0^{|cut(t)|} from the depth-limited cut; exact is false when the cut hit
// max_depth (value is then a truncation proxy).
struct MaximalValue {
    double value = 1.0;
    bool exact = true;
    long leaves = 0;
};
MaximalValue maximal_process_value(const cascade::CascadeRealization& r,
                                   double u0, double t);

// w0 * (internal count + 1) when every ray crossed t by max_depth (the cut
// is then finite with internal+1 leaves), 0 when some ray is still alive at
// max_depth.
double minimal_pantograph_value(const cascade::CascadeRealization& r,
                                double w0, double t);

// Certified cutoff coefficient for the rho ground at this threshold m and
// alpha in (1, 2]: 90% of 4 inf_{t >= m} f(t) where f is the comparison
// ratio from the one-step inequality, followed by a direct numeric check of
// F[rho] <= rho on a dense grid. Throws std::runtime_error("m too small")
// when the infimum is not positive, or on certification failure.
double admissible_delta(double m, double alpha);
bool delta_is_admissible(double m, double alpha, double delta);

// Right endpoint of the admissible initial-data interval
// [0, endpoint) union {1}:  max{1, (2a-1)/4 - (6a^2-15a+4)/(4(a-1)(2a-1))}
// at a = alpha.
double r_alpha_range(double alpha);

// Truncated single-path explosion time: s_lower sums alpha^{-j} T_j for
// j = first_index .. first_index + k_trunc - 1 (clocks from stream slot j);
// tail_mean is the expectation of the dropped tail, alpha^{-k_trunc}/(1 - 1/alpha).
struct UnaryExplosion {
    double s_lower = 0.0;
    double tail_mean = 0.0;
};
UnaryExplosion unary_explosion_sample(std::uint64_t seed, double alpha,
                                      int k_trunc, int first_index = 0);

// (t - S)^{-gamma_a} when the truncated explosion time S is below t, else 0,
// with gamma_a = ln a / ln alpha. Satisfies the exact pathwise recursion
//   value(t, k, first) = a * value(alpha (t - T_first), k - 1, first + 1).
double unary_process_value(std::uint64_t seed, double alpha, double a,
                           double t, int k_trunc, int first_index = 0);

// Single-path coin-thinned sampler for the initial-value pantograph
// solution with a in (0, 1): each step rings a clock (stream slot 2j) and,
// if the running explosion sum is still below t, flips a coin (slot 2j+1)
// that continues with probability a. Returns w0 when the path overshoots t
// before any coin failure, 0 otherwise. Terminates almost surely.
double thinned_unary_value(std::uint64_t seed, double alpha, double a,
                           double w0, double t);

// Evaluate the full spec (iterate + transform) on one realization.
double process_value(const cascade::CascadeRealization& r,
                     const ProcessSpec& spec, double t);

}  // namespace asa::processes

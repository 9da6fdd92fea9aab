#include "asa/processes.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "asa/quadrature.hpp"
#include "asa/rng.hpp"
#include "asa/treeindex.hpp"

namespace asa::processes {

namespace {

// Depth-first walk over the alive prefix of the tree, down to generation
// n-1. on_cut_leaf fires for every vertex at generation <= n-1 that died
// while its parent was alive (the root fires if it died itself);
// on_parent(theta) fires for every alive generation-(n-1) vertex. Either
// callback may return false to abort. Returns false iff aborted.
//
// Pruning dead subtrees is exact: theta only grows along a path, so every
// descendant of a dead vertex is dead too.
template <class LeafFn, class ParentFn>
bool walk_alive(const cascade::CascadeRealization& r, int n, double t,
                LeafFn&& on_cut_leaf, ParentFn&& on_parent) {
    const double theta_root = r.level_scale(0) * r.clock(tree::kRoot);
    if (theta_root >= t) return on_cut_leaf();
    if (n == 1) return on_parent(theta_root);
    struct Frame {
        tree::VertexId v;
        int gen;
        double theta;
    };
    std::vector<Frame> stack;
    stack.reserve(64);
    stack.push_back({tree::kRoot, 0, theta_root});
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const double child_scale = r.level_scale(f.gen + 1);
        for (int digit = 1; digit <= 2; ++digit) {
            const tree::VertexId c = tree::child(f.v, digit);
            const double th = f.theta + child_scale * r.clock(c);
            if (th >= t) {
                if (!on_cut_leaf()) return false;
            } else if (f.gen + 1 == n - 1) {
                if (!on_parent(th)) return false;
            } else {
                stack.push_back({c, f.gen + 1, th});
            }
        }
    }
    return true;
}

void check_generations(const cascade::CascadeRealization& r, int n) {
    if (n < 0) throw std::invalid_argument("processes: negative generations");
    if (n > r.max_depth())
        throw std::invalid_argument("processes: generations exceed realization depth");
}

// u0^n_leaves * delta^n_slots without spurious NaN from 0 * inf after
// under/overflow; 0^0 = 1 throughout.
double constant_ground_value(double u0, long n_leaves, double delta,
                             long n_slots) {
    if (u0 == 0.0)
        return n_leaves > 0 ? 0.0 : std::pow(delta, static_cast<double>(n_slots));
    if (delta == 0.0)
        return n_slots > 0 ? 0.0 : std::pow(u0, static_cast<double>(n_leaves));
    const double v1 = std::pow(u0, static_cast<double>(n_leaves));
    const double v2 = std::pow(delta, static_cast<double>(n_slots));
    const double v = v1 * v2;
    if (!std::isnan(v)) return v;
    // one factor underflowed to 0 while the other overflowed: assemble the
    // exponent sum in log space instead
    return std::exp(static_cast<double>(n_leaves) * std::log(u0) +
                    static_cast<double>(n_slots) * std::log(delta));
}

}  // namespace

GroundState GroundState::constant(double delta) {
    if (delta < 0.0) throw std::invalid_argument("ground: negative constant");
    GroundState g;
    g.kind = Kind::constant;
    g.delta = delta;
    return g;
}

GroundState GroundState::rho(double m, double delta, double gamma) {
    if (!(m > 0.0) || !(delta > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("ground: rho needs positive m, delta, gamma");
    GroundState g;
    g.kind = Kind::rho;
    g.m = m;
    g.delta = delta;
    g.gamma = gamma;
    return g;
}

GroundState GroundState::athreya_mu(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("ground: gamma must be positive");
    GroundState g;
    g.kind = Kind::athreya_mu;
    g.gamma = gamma;
    return g;
}

GroundState GroundState::athreya_ga(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("ground: gamma must be positive");
    GroundState g;
    g.kind = Kind::athreya_ga;
    g.gamma = gamma;
    return g;
}

GroundState GroundState::tabulated(picard::GridFunction table) {
    GroundState g;
    g.kind = Kind::tabulated;
    g.table = std::move(table);
    return g;
}

double GroundState::operator()(double t) const {
    switch (kind) {
        case Kind::constant:
            return delta;
        case Kind::rho:
            return t <= m ? 1.0 : 1.0 - delta * std::pow(t, -gamma);
        case Kind::athreya_mu:
            return t > 0.0 ? std::exp(-std::pow(t, -gamma)) : 0.0;
        case Kind::athreya_ga:
            return t > 0.0 ? std::exp(-std::pow(t, -gamma)) *
                                 (1.0 + gamma * std::pow(t, -(gamma + 1.0)))
                           : 0.0;
        case Kind::tabulated:
            return table(t);
    }
    return 0.0;
}

Transform Transform::none() { return Transform{}; }

Transform Transform::exponential(double lambda) {
    if (lambda < 0.0)
        throw std::invalid_argument("transform: exponential needs lambda >= 0");
    Transform tr;
    tr.kind = Kind::exponential;
    tr.lambda = lambda;
    return tr;
}

Transform Transform::power(double lambda) {
    Transform tr;
    tr.kind = Kind::power;
    tr.lambda = lambda;
    return tr;
}

Transform Transform::product_with_maximal(double u0) {
    if (u0 < 0.0)
        throw std::invalid_argument("transform: maximal factor needs u0 >= 0");
    Transform tr;
    tr.kind = Kind::product_with_maximal;
    tr.u0 = u0;
    return tr;
}

double apply_transform(double x, const Transform& tr, double maximal_factor) {
    switch (tr.kind) {
        case Transform::Kind::none:
            return x;
        case Transform::Kind::exponential:
            return std::exp(-tr.lambda * x);
        case Transform::Kind::power:
            if (x < 0.0)
                throw std::domain_error("transform: power of negative base");
            if (x == 0.0) return tr.lambda > 0.0 ? 0.0 : 1.0;
            return std::pow(x, tr.lambda);
        case Transform::Kind::product_with_maximal:
            return maximal_factor * x;
    }
    return x;
}

CutCounts count_cut(const cascade::CascadeRealization& r, int n, double t) {
    check_generations(r, n);
    CutCounts c;
    if (n == 0) return c;
    walk_alive(
        r, n, t,
        [&] {
            ++c.cut_leaves;
            return true;
        },
        [&](double) {
            c.reached_slots += 2;
            return true;
        });
    return c;
}

double multiplicative_iterate(const cascade::CascadeRealization& r,
                              const GroundState& ground, double u0, int n,
                              double t) {
    check_generations(r, n);
    if (n == 0) return ground(t);

    if (ground.kind == GroundState::Kind::constant) {
        if (ground.delta == 0.0) {
            // any reached slot zeroes the product; abort on the first alive
            // generation-(n-1) vertex so post-explosion deep iterates stay cheap
            long leaves = 0;
            const bool no_parent = walk_alive(
                r, n, t,
                [&] {
                    ++leaves;
                    return true;
                },
                [](double) { return false; });
            if (!no_parent) return 0.0;
            return std::pow(u0, static_cast<double>(leaves));
        }
        if (u0 == 0.0) {
            // any cut leaf zeroes the value; abort on the first one
            long slots = 0;
            const bool no_leaf = walk_alive(
                r, n, t, [] { return false; },
                [&](double) {
                    slots += 2;
                    return true;
                });
            if (!no_leaf) return 0.0;
            return std::pow(ground.delta, static_cast<double>(slots));
        }
        const CutCounts c = count_cut(r, n, t);
        return constant_ground_value(u0, c.cut_leaves, ground.delta,
                                     c.reached_slots);
    }

    const double an = std::pow(r.alpha(), n);
    long leaves = 0;
    double prod = 1.0;
    walk_alive(
        r, n, t,
        [&] {
            ++leaves;
            return true;
        },
        [&](double theta) {
            const double g = ground(an * (t - theta));
            prod *= g * g;
            return true;
        });
    if (leaves == 0) return prod;
    return std::pow(u0, static_cast<double>(leaves)) * prod;
}

double additive_iterate(const cascade::CascadeRealization& r,
                        const picard::GridFunction& eta, int n, double t) {
    check_generations(r, n);
    if (eta.left_value() != 0.0)
        throw std::invalid_argument("additive iterate: table must vanish left of its grid");
    if (n == 0) return eta(t);
    const double an = std::pow(r.alpha(), n);
    double sum = 0.0;
    walk_alive(
        r, n, t, [] { return true; },
        [&](double theta) {
            sum += 2.0 * eta(an * (t - theta));
            return true;
        });
    return sum;
}

MaximalValue maximal_process_value(const cascade::CascadeRealization& r,
                                   double u0, double t) {
    if (u0 < 0.0) throw std::invalid_argument("maximal process: u0 must be >= 0");
    const cascade::TreeCut cut = cascade::tree_cut(r, t);
    MaximalValue mv;
    mv.leaves = static_cast<long>(cut.leaves.size());
    mv.exact = cut.complete;
    mv.value = std::pow(u0, static_cast<double>(mv.leaves));
    return mv;
}

double minimal_pantograph_value(const cascade::CascadeRealization& r,
                                double w0, double t) {
    const cascade::TreeCut cut = cascade::tree_cut(r, t);
    if (!cut.complete) return 0.0;
    return w0 * static_cast<double>(cut.internal.size() + 1);
}

namespace {

// Comparison ratio whose infimum over [m, inf) bounds delta/4 in the
// one-step inequality for the rho ground:
//   f(t) = (INT_{m/alpha}^t e^{s-t} s^{-gamma} ds - t^{-gamma})
//          / INT_{m/alpha}^t e^{s-t} s^{-2 gamma} ds.
// Both integrals are carried along the scan incrementally, normalized at
// the current t so nothing overflows.
struct RatioScan {
    double alpha, gamma, lo;
    double j1 = 0.0, j2 = 0.0;
    double t_prev;

    RatioScan(double alpha_, double gamma_, double m)
        : alpha(alpha_), gamma(gamma_), lo(m / alpha_), t_prev(m / alpha_) {}

    double advance_to(double t) {
        const double decay = std::exp(-(t - t_prev));
        const double p1 = quad::integrate(
            [&](double s) { return std::exp(s - t) * std::pow(s, -gamma); },
            t_prev, t, 1e-13);
        const double p2 = quad::integrate(
            [&](double s) { return std::exp(s - t) * std::pow(s, -2.0 * gamma); },
            t_prev, t, 1e-13);
        j1 = j1 * decay + p1;
        j2 = j2 * decay + p2;
        t_prev = t;
        return (j1 - std::pow(t, -gamma)) / j2;
    }
};

}  // namespace

bool delta_is_admissible(double m, double alpha, double delta) {
    if (!(alpha > 1.0) || !(alpha <= 2.0))
        throw std::invalid_argument("admissible delta: alpha must lie in (1, 2]");
    if (!(m > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("admissible delta: m and delta must be positive");
    const double gamma = std::log(2.0) / std::log(alpha);
    const GroundState rho = GroundState::rho(m, delta, gamma);
    // direct check of the one-step inequality F[rho] <= rho on a dense grid,
    // carried incrementally via the same normalized-integral scheme as the
    // fixed-point stepper
    const int n_check = 1000;
    const double t_max = std::max(5.0 * m, 100.0);
    double acc = 0.0;
    double t_prev = 0.0;
    for (int i = 1; i <= n_check; ++i) {
        const double t = t_max * static_cast<double>(i) / n_check;
        const double u_lo = alpha * t_prev;
        const double u_hi = alpha * t;
        const double panel = quad::integrate(
            [&](double u) {
                const double g = rho(u);
                return std::exp((u - u_hi) / alpha) * g * g;
            },
            u_lo, u_hi, 1e-12, {m});
        acc = acc * std::exp(-(t - t_prev)) + panel;
        const double f_rho = std::exp(-t) + acc / alpha;
        if (f_rho > rho(t) + 1e-8) return false;
        t_prev = t;
    }
    return true;
}

double admissible_delta(double m, double alpha) {
    if (!(alpha > 1.0) || !(alpha <= 2.0))
        throw std::invalid_argument("admissible delta: alpha must lie in (1, 2]");
    if (!(m > 0.0)) throw std::invalid_argument("admissible delta: m must be positive");
    const double gamma = std::log(2.0) / std::log(alpha);
    // scan the ratio from m outward; for gamma >= 1 (alpha <= 2) it grows
    // without bound once the exponential kernel saturates, so a long finite
    // scan brackets the true infimum
    RatioScan scan(alpha, gamma, m);
    scan.advance_to(m);
    double inf_f = (scan.j1 - std::pow(m, -gamma)) / scan.j2;
    const double t_end = m + 400.0;
    const int steps = 2000;
    for (int i = 1; i <= steps; ++i) {
        const double t = m + (t_end - m) * static_cast<double>(i) / steps;
        inf_f = std::min(inf_f, scan.advance_to(t));
    }
    if (!(inf_f > 0.0)) throw std::runtime_error("processes: m too small");
    const double delta = 0.9 * 4.0 * inf_f;
    if (!delta_is_admissible(m, alpha, delta))
        throw std::runtime_error("admissible delta: certification failed");
    return delta;
}

double r_alpha_range(double alpha) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("initial-data range: alpha must exceed 1");
    const double head = (2.0 * alpha - 1.0) / 4.0;
    const double tail = (6.0 * alpha * alpha - 15.0 * alpha + 4.0) /
                        (4.0 * (alpha - 1.0) * (2.0 * alpha - 1.0));
    return std::max(1.0, head - tail);
}

UnaryExplosion unary_explosion_sample(std::uint64_t seed, double alpha,
                                      int k_trunc, int first_index) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("unary explosion: alpha must exceed 1");
    if (k_trunc < 1 || first_index < 0)
        throw std::invalid_argument("unary explosion: bad truncation");
    UnaryExplosion ue;
    double scale = 1.0;
    for (int i = 0; i < k_trunc; ++i) {
        ue.s_lower += scale * rng::exp1(rng::at(seed, first_index + i));
        scale /= alpha;
    }
    ue.tail_mean = scale / (1.0 - 1.0 / alpha);  // scale == alpha^{-k_trunc}
    return ue;
}

double unary_process_value(std::uint64_t seed, double alpha, double a,
                           double t, int k_trunc, int first_index) {
    if (!(a > 0.0) || !(alpha > a) || !(alpha > 1.0))
        throw std::invalid_argument("unary process: needs alpha > max(a, 1), a > 0");
    const double gamma_a = std::log(a) / std::log(alpha);
    const double s = unary_explosion_sample(seed, alpha, k_trunc, first_index).s_lower;
    if (s >= t) return 0.0;
    return std::pow(t - s, -gamma_a);
}

double thinned_unary_value(std::uint64_t seed, double alpha, double a,
                           double w0, double t) {
    if (!(a > 0.0) || !(a < 1.0))
        throw std::invalid_argument("thinned sampler: a must lie in (0, 1)");
    if (!(alpha > 0.0))
        throw std::invalid_argument("thinned sampler: alpha must be positive");
    double s = 0.0;
    double scale = 1.0;
    // coin failure is geometric, so this terminates almost surely; the cap
    // is defensive only
    for (long j = 0; j < 100000000L; ++j) {
        s += scale * rng::exp1(rng::at(seed, 2 * j));
        if (s > t) return w0;
        if (rng::uniform01(rng::at(seed, 2 * j + 1)) >= a) return 0.0;
        scale /= alpha;
    }
    return 0.0;
}

double process_value(const cascade::CascadeRealization& r,
                     const ProcessSpec& spec, double t) {
    double x;
    if (spec.equation == Equation::pantograph) {
        if (spec.ground.kind != GroundState::Kind::tabulated)
            throw std::invalid_argument("process: additive iterate needs a tabulated ground");
        x = additive_iterate(r, spec.ground.table, spec.generations, t);
    } else {
        x = multiplicative_iterate(r, spec.ground, spec.u0_or_w0,
                                   spec.generations, t);
    }
    double maximal = 1.0;
    if (spec.transform.kind == Transform::Kind::product_with_maximal)
        maximal = maximal_process_value(r, spec.transform.u0, t).value;
    return apply_transform(x, spec.transform, maximal);
}

}  // namespace asa::processes

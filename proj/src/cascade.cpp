#include "asa/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "asa/rng.hpp"

namespace asa::cascade {

namespace {
constexpr double kBaselSum = std::numbers::pi * std::numbers::pi / 6.0;
// dense per-generation caches above this get silly (2^22 doubles = 32 MiB)
constexpr int kLevelCacheCap = 22;
}  // namespace

double sample_clock(const CascadeParams& p, VertexId v) {
    return rng::exp1(rng::at(p.seed, v));
}

CascadeRealization::CascadeRealization(CascadeParams p) : params_(p) {
    if (!(params_.alpha > 0.0)) throw std::invalid_argument("cascade: alpha must be positive");
    if (params_.max_depth < 1) throw std::invalid_argument("cascade: max_depth must be >= 1");
    scales_.push_back(1.0);
}

double CascadeRealization::level_scale(int g) const {
    std::lock_guard lock(mu_);
    while (static_cast<int>(scales_.size()) <= g)
        scales_.push_back(scales_.back() / params_.alpha);
    return scales_[static_cast<std::size_t>(g)];
}

double CascadeRealization::theta(VertexId v) const {
    if (v == 0) throw std::domain_error("cascade: serial 0 is not a vertex");
    const int g = tree::generation(v);
    // accumulate root-down so the bits match the dense-cache recurrence
    VertexId anc[64];
    VertexId u = v;
    for (int i = g; i >= 0; --i) {
        anc[i] = u;
        u >>= 1;
    }
    double th = 0.0;
    for (int i = 0; i <= g; ++i) th += level_scale(i) * clock(anc[i]);
    return th;
}

void CascadeRealization::materialize_levels(int g) const {
    std::lock_guard lock(mu_);
    while (static_cast<int>(scales_.size()) <= g)
        scales_.push_back(scales_.back() / params_.alpha);
    if (levels_.empty()) levels_.push_back({clock(tree::kRoot)});
    for (int lv = static_cast<int>(levels_.size()); lv <= g; ++lv) {
        const auto& prev = levels_[static_cast<std::size_t>(lv - 1)];
        std::vector<double> cur(prev.size() * 2);
        const double scale = scales_[static_cast<std::size_t>(lv)];
        const VertexId first = VertexId{1} << lv;
        for (VertexId j = 0; j < cur.size(); ++j)
            cur[j] = prev[j / 2] + scale * clock(first + j);
        levels_.push_back(std::move(cur));
    }
    levels_ready_ = std::max(levels_ready_, g);
}

const std::vector<double>& CascadeRealization::theta_level(int g) const {
    if (g < 0 || g > params_.max_depth)
        throw std::out_of_range("cascade: generation outside [0, max_depth]");
    if (g > kLevelCacheCap)
        throw std::out_of_range("cascade: dense level cache capped at generation 22");
    if (g > levels_ready_) materialize_levels(g);
    std::lock_guard lock(mu_);
    return levels_[static_cast<std::size_t>(g)];
}

TreeCut tree_cut(const CascadeRealization& r, double t) {
    TreeCut cut;
    cut.t = t;
    // t <= 0 resolves at the root: Theta_root >= 0 >= t makes it the sole leaf

    const int n = r.max_depth();
    struct Frame {
        VertexId v;
        int g;
        double theta_parent;
    };
    std::vector<Frame> stack{{tree::kRoot, 0, 0.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const double th = f.theta_parent + r.level_scale(f.g) * r.clock(f.v);
        if (th >= t) {
            cut.leaves.push_back(f.v);
            continue;
        }
        cut.internal.push_back(f.v);
        if (f.g == n) {
            cut.complete = false;  // still alive at the truncation depth: children unknown
            continue;
        }
        stack.push_back({2 * f.v + 1, f.g + 1, th});
        stack.push_back({2 * f.v, f.g + 1, th});
    }
    std::sort(cut.leaves.begin(), cut.leaves.end());
    std::sort(cut.internal.begin(), cut.internal.end());
    return cut;
}

void dump_csv(const CascadeRealization& r, std::ostream& os, int depth) {
    depth = std::min(depth, r.max_depth());
    os << "serial,generation,clock,theta\n";
    char buf[160];
    for (int g = 0; g <= depth; ++g) {
        const auto& level = r.theta_level(g);
        const VertexId first = VertexId{1} << g;
        for (VertexId j = 0; j < level.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%llu,%d,%.17g,%.17g\n",
                          static_cast<unsigned long long>(first + j), g,
                          r.clock(first + j), level[j]);
            os << buf;
        }
    }
}

namespace {

enum class Extreme { min, max };

// exact branch-and-bound extreme of Theta over the depth-max_depth descendants
// of `root`; max-pruning leans on the hard clock ceiling of the generator
double extreme_theta(const CascadeRealization& r, VertexId root, Extreme which) {
    const int n = r.max_depth();
    const int g0 = tree::generation(root);

    // capsum[g] = kClockCeiling * sum_{j=g}^{n} alpha^{-j}: the most a path can
    // still gain from generation g onwards
    std::vector<double> capsum(static_cast<std::size_t>(n) + 2, 0.0);
    for (int g = n; g >= 0; --g)
        capsum[static_cast<std::size_t>(g)] =
            capsum[static_cast<std::size_t>(g) + 1] + rng::kClockCeiling * r.level_scale(g);

    struct Frame {
        VertexId v;
        int g;
        double theta;
    };
    std::vector<Frame> stack{{root, g0, r.theta(root)}};
    const bool want_max = which == Extreme::max;
    double best = want_max ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.g == n) {
            if (want_max ? f.theta > best : f.theta < best) best = f.theta;
            continue;
        }
        if (want_max) {
            if (f.theta + capsum[static_cast<std::size_t>(f.g) + 1] <= best) continue;
        } else {
            if (f.theta >= best) continue;  // increments are positive
        }
        const double scale = r.level_scale(f.g + 1);
        const VertexId c0 = 2 * f.v;
        const double t0 = f.theta + scale * r.clock(c0);
        const double t1 = f.theta + scale * r.clock(c0 + 1);
        // explore the more promising child first (LIFO pops it next)
        const bool first_child_first = want_max ? (t0 >= t1) : (t0 <= t1);
        if (first_child_first) {
            stack.push_back({c0 + 1, f.g + 1, t1});
            stack.push_back({c0, f.g + 1, t0});
        } else {
            stack.push_back({c0, f.g + 1, t0});
            stack.push_back({c0 + 1, f.g + 1, t1});
        }
    }
    return best;
}

}  // namespace

double truncated_min_theta(const CascadeRealization& r) {
    return extreme_theta(r, tree::kRoot, Extreme::min);
}

double truncated_max_theta(const CascadeRealization& r) {
    return extreme_theta(r, tree::kRoot, Extreme::max);
}

double subtree_max_theta(const CascadeRealization& r, VertexId root) {
    return extreme_theta(r, root, Extreme::max);
}

double theta_tail_tau(double alpha, int from_gen, double budget) {
    if (!(alpha > 1.0)) return std::numeric_limits<double>::infinity();
    if (!(budget > 0.0 && budget < 1.0))
        throw std::invalid_argument("cascade: tail budget must lie in (0,1)");
    // residual mass sum_{j>=m} (j+1)^{-2} / (pi^2/6): finite sum plus an
    // integral bound on the rest, so the estimate stays an upper bound
    double residual = 0.0;
    const int last = from_gen + 10000;
    for (int j = from_gen; j < last; ++j)
        residual += 1.0 / ((j + 1.0) * (j + 1.0));
    residual += 1.0 / (last + 1.0);
    residual /= kBaselSum;
    return std::max(0.0, std::log(residual / budget));
}

double theta_tail_sum(double alpha, int from_gen, double tau) {
    if (!(alpha > 1.0)) return std::numeric_limits<double>::infinity();
    const double lc0 = std::log(kBaselSum);
    double sum = 0.0;
    double inv = std::pow(alpha, -from_gen);
    for (int j = from_gen; j < from_gen + 200000; ++j) {
        const double delta = (tau + j * std::numbers::ln2 + 2.0 * std::log(j + 1.0) + lc0) * inv;
        sum += delta;
        inv /= alpha;
        if (delta < 1e-18 * sum) break;
    }
    return sum;
}

ExtremeBounds extreme_bounds(const CascadeRealization& r, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("cascade: epsilon outside (0,1)");
    const int n = r.max_depth();
    const double alpha = r.alpha();

    ExtremeBounds b;
    b.s_lower = truncated_min_theta(r);
    b.l_lower = truncated_max_theta(r);
    b.confidence = 1.0 - epsilon;

    if (alpha <= 1.0) {
        b.s_upper = std::numeric_limits<double>::infinity();
        b.l_upper = std::numeric_limits<double>::infinity();
        return b;
    }

    // S <= S_n plus the tail of one ray below the argmin leaf; the tail mean is
    // alpha^{-n}/(alpha-1), inflated by 2/eps (Markov) to confidence 1 - eps/2
    const double mean_tail = std::pow(alpha, -n) / (alpha - 1.0);
    b.s_upper = b.s_lower + mean_tail * (2.0 / epsilon);

    // L <= L_n + sum_{j>n} delta_j(tau) off the per-generation maxima schedule;
    // the union bound spends the remaining eps/2
    const double tau = theta_tail_tau(alpha, n + 1, epsilon / 2.0);
    b.l_upper = b.l_lower + theta_tail_sum(alpha, n + 1, tau);
    return b;
}

std::vector<SubtreeVerdict> detect_hyperexplosive(const CascadeRealization& r,
                                                  double t, double epsilon) {
    if (!(t > 0.0)) throw std::invalid_argument("cascade: horizon must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("cascade: epsilon outside (0,1)");

    std::vector<SubtreeVerdict> found;
    if (r.alpha() <= 1.0) return found;  // every ray survives: nothing to find

    const int n = r.max_depth();
    // one global tail schedule certifies every subtree at once: the event "some
    // generation-j maximum beats delta_j" does not depend on the subtree root
    const double tail =
        theta_tail_sum(r.alpha(), n + 1, theta_tail_tau(r.alpha(), n + 1, epsilon));

    struct Frame {
        VertexId v;
        int g;
        double theta_parent;
    };
    std::vector<Frame> stack{{tree::kRoot, 0, 0.0}};
    long visited = 0;
    constexpr long kVisitCap = 200000;  // stay bounded on adversarial horizons
    while (!stack.empty() && visited < kVisitCap) {
        const Frame f = stack.back();
        stack.pop_back();
        ++visited;
        if (subtree_max_theta(r, f.v) + tail <= t) {
            // every truncated ray ends before t and the schedule caps the rest:
            // confirmed hyper; children are covered, keeping the output maximal
            found.push_back({f.v, Verdict::hyper});
            continue;
        }
        // not certified here, but a descendant subtree may still qualify; only
        // subtrees hanging off vertices alive before t can (Theta_v >= t puts
        // every deeper ray past t already)
        if (f.g < n) {
            const double th = f.theta_parent + r.level_scale(f.g) * r.clock(f.v);
            if (th < t) {
                stack.push_back({2 * f.v + 1, f.g + 1, th});
                stack.push_back({2 * f.v, f.g + 1, th});
            }
        }
    }
    return found;
}

}  // namespace asa::cascade

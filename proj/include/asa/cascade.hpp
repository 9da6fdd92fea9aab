#pragma once

// ASA cascade sampling and its time-evolution objects.
//
// A realization attaches a mean-one exponential clock T_v to every vertex of
// the binary tree, rescaled to a holding time Y_v = alpha^{-|v|} T_v, and
// accumulates replacement times Theta_v = sum of Y along the root path.
// Clocks are pure functions of (seed, serial) so the realization is lazy,
// immutable and arbitrarily extendable.
//
// On top of that we compute:
//   * tree_cut           -- the t-leaf set dV(t) and interior V(t) up to max_depth
//   * extreme_bounds     -- exact truncated extremes S_n / L_n plus confidence
//                           brackets for the untruncated S and L
//   * detect_hyperexplosive -- maximal subtrees all of whose rays die by t

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <vector>

#include "asa/treeindex.hpp"

namespace asa::cascade {

using tree::VertexId;

struct CascadeParams {
    double alpha = 2.0;
    std::uint64_t seed = 0;
    int max_depth = 10;  // deepest generation traversals are allowed to touch
};

// T_v: pure in (seed, serial) -- two queries always return identical bits.
double sample_clock(const CascadeParams& p, VertexId v);

class CascadeRealization {
public:
    explicit CascadeRealization(CascadeParams p);

    const CascadeParams& params() const { return params_; }
    int max_depth() const { return params_.max_depth; }
    double alpha() const { return params_.alpha; }

    double clock(VertexId v) const { return sample_clock(params_, v); }

    // alpha^{-g}, built by repeated division so every consumer sees the same bits
    double level_scale(int g) const;

    // Theta_v; O(|v|) when uncached, O(1) after materialize_levels(|v|)
    double theta(VertexId v) const;

    // dense per-generation Theta cache, serials 2^g..2^{g+1}-1 in order.
    // Materialization is idempotent; concurrent callers are safe.
    const std::vector<double>& theta_level(int g) const;

private:
    void materialize_levels(int g) const;

    CascadeParams params_;
    mutable std::vector<std::vector<double>> levels_;
    mutable std::vector<double> scales_;
    mutable int levels_ready_ = -1;
    mutable std::mutex mu_;
};

struct TreeCut {
    double t = 0.0;
    std::vector<VertexId> leaves;    // dV(t): Theta_parent < t <= Theta_v
    std::vector<VertexId> internal;  // V(t): Theta_v < t
    bool complete = true;            // no vertex at depth max_depth was reached
};

TreeCut tree_cut(const CascadeRealization& r, double t);

// CSV dump of the materialized tree: serial,generation,clock,theta
void dump_csv(const CascadeRealization& r, std::ostream& os, int depth);

struct ExtremeBounds {
    double s_lower = 0.0;  // S_n = min_{|v|=n} Theta_v, exact
    double s_upper = 0.0;
    double l_lower = 0.0;  // L_n = max_{|v|=n} Theta_v, exact
    double l_upper = 0.0;  // may be +infinity for alpha <= 1
    double confidence = 1.0;  // P(S <= s_upper and L <= l_upper) >= confidence
};

ExtremeBounds extreme_bounds(const CascadeRealization& r, double epsilon);

// exact truncated extremes at generation n = max_depth (branch-and-bound;
// pruning is exact because clocks are bounded by rng::kClockCeiling)
double truncated_min_theta(const CascadeRealization& r);
double truncated_max_theta(const CascadeRealization& r);
// max of Theta over the depth-max_depth descendants of `root` (root included
// if it already sits at the deepest generation)
double subtree_max_theta(const CascadeRealization& r, VertexId root);

// Tail schedule for sup-ray bounds beyond the truncation depth, following the
// union bound over per-generation maxima M_j:
//   delta_j(tau) = (tau + j ln2 + 2 ln(j+1) + ln(pi^2/6)) / alpha^j,
//   P(M_j > delta_j for some j >= m) <= e^{-tau} * sum_{j>=m} (j+1)^{-2}/(pi^2/6).
double theta_tail_tau(double alpha, int from_gen, double budget);  // smallest workable tau
double theta_tail_sum(double alpha, int from_gen, double tau);     // sum_{j>=from_gen} delta_j(tau)

enum class Verdict { hyper, not_hyper, undecided };

struct SubtreeVerdict {
    VertexId root = tree::kRoot;
    Verdict verdict = Verdict::undecided;
};

// Maximal t-hyperexplosive subtree roots: subtrees whose every ray accumulates
// its whole (infinite) clock budget before t, certified at confidence 1-eps.
// Only confirmed roots are returned and none is an ancestor of another.
std::vector<SubtreeVerdict> detect_hyperexplosive(const CascadeRealization& r,
                                                  double t, double epsilon);

}  // namespace asa::cascade

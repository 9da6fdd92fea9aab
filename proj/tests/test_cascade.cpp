#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "asa/cascade.hpp"
#include "asa/rng.hpp"

using namespace asa;

namespace {

cascade::CascadeRealization make(double alpha, std::uint64_t seed, int depth) {
    cascade::CascadeParams p;
    p.alpha = alpha;
    p.seed = seed;
    p.max_depth = depth;
    return cascade::CascadeRealization(p);
}

}  // namespace

TEST_CASE("cascade: clocks are pure, positive and capped") {
    const auto r = make(2.0, 77, 10);
    for (cascade::VertexId v = 1; v < 2000; ++v) {
        const double c = r.clock(v);
        CHECK(c == r.clock(v));
        CHECK(c > 0.0);
        CHECK(c < rng::kClockCeiling);
    }
    // different seeds give different clocks
    const auto r2 = make(2.0, 78, 10);
    CHECK(r.clock(1) != r2.clock(1));
}

TEST_CASE("cascade: theta accumulates scaled clocks along the path") {
    const auto r = make(3.0, 5, 12);
    for (cascade::VertexId v = 2; v < 4096; ++v) {
        const int g = tree::generation(v);
        CHECK(r.theta(v) ==
              r.theta(tree::parent(v)) + r.level_scale(g) * r.clock(v));
        CHECK(r.theta(v) > r.theta(tree::parent(v)));
    }
    CHECK(r.theta(tree::kRoot) == r.level_scale(0) * r.clock(tree::kRoot));
    CHECK(r.level_scale(0) == 1.0);
    CHECK(r.level_scale(3) == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
}

TEST_CASE("cascade: theta_level matches pointwise theta") {
    const auto r = make(1.4, 17, 10);
    for (int g = 0; g <= 6; ++g) {
        const auto& lvl = r.theta_level(g);
        REQUIRE(lvl.size() == (std::size_t{1} << g));
        const cascade::VertexId lo = cascade::VertexId{1} << g;
        for (std::size_t i = 0; i < lvl.size(); ++i)
            CHECK(lvl[i] == r.theta(lo + i));
    }
}

TEST_CASE("cascade: tree cut partitions and the leaf-interior count identity") {
    int complete_seen = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto r = make(3.0, seed, 14);
        const double t = 0.4;
        const auto cut = cascade::tree_cut(r, t);
        for (auto v : cut.internal) CHECK(r.theta(v) < t);
        for (auto v : cut.leaves) {
            CHECK(r.theta(v) >= t);
            if (v != tree::kRoot) CHECK(r.theta(tree::parent(v)) < t);
        }
        // leaves and interior are disjoint and every interior vertex's children
        // are accounted for
        std::set<cascade::VertexId> leaves(cut.leaves.begin(), cut.leaves.end());
        for (auto v : cut.internal) CHECK(leaves.count(v) == 0);
        if (cut.complete) {
            ++complete_seen;
            CHECK(cut.leaves.size() == cut.internal.size() + 1);
        }
    }
    CHECK(complete_seen >= 20);  // at this horizon most cuts close early
}

TEST_CASE("cascade: trivial cut at t=0 is the root leaf") {
    const auto r = make(2.0, 1, 8);
    const auto cut = cascade::tree_cut(r, 0.0);
    REQUIRE(cut.leaves.size() == 1);
    CHECK(cut.leaves[0] == tree::kRoot);
    CHECK(cut.internal.empty());
    CHECK(cut.complete);
}

TEST_CASE("cascade: branch-and-bound extremes equal brute force") {
    for (std::uint64_t seed : {3u, 9u, 21u}) {
        for (double alpha : {0.8, 1.0, 1.4, 3.0}) {
            const auto r = make(alpha, seed, 10);
            const auto& lvl = r.theta_level(10);
            const double lo = *std::min_element(lvl.begin(), lvl.end());
            const double hi = *std::max_element(lvl.begin(), lvl.end());
            CHECK(cascade::truncated_min_theta(r) == lo);
            CHECK(cascade::truncated_max_theta(r) == hi);
            CHECK(cascade::subtree_max_theta(r, tree::kRoot) == hi);
        }
    }
}

TEST_CASE("cascade: generation extremes are monotone in depth") {
    const auto r = make(3.0, 40, 12);
    double prev_min = 0.0, prev_max = 0.0;
    for (int g = 0; g <= 12; ++g) {
        const auto& lvl = r.theta_level(g);
        const double mn = *std::min_element(lvl.begin(), lvl.end());
        const double mx = *std::max_element(lvl.begin(), lvl.end());
        if (g > 0) {
            CHECK(mn >= prev_min);
            CHECK(mx >= prev_max);
        }
        prev_min = mn;
        prev_max = mx;
    }
}

TEST_CASE("cascade: extreme bounds bracket and degrade to infinity when rays survive") {
    const auto r = make(3.0, 8, 16);
    const auto b = cascade::extreme_bounds(r, 1e-3);
    CHECK(b.s_lower == cascade::truncated_min_theta(r));
    CHECK(b.l_lower == cascade::truncated_max_theta(r));
    CHECK(b.s_upper >= b.s_lower);
    CHECK(b.l_upper >= b.l_lower);
    CHECK(std::isfinite(b.l_upper));
    CHECK(b.confidence == doctest::Approx(0.999));

    const auto r2 = make(0.9, 8, 12);
    const auto b2 = cascade::extreme_bounds(r2, 1e-3);
    CHECK(std::isinf(b2.s_upper));
    CHECK(std::isinf(b2.l_upper));
    CHECK(b2.s_lower > 0.0);
}

TEST_CASE("cascade: tail schedule sums shrink with depth and respect the budget") {
    const double alpha = 3.0;
    for (double budget : {1e-2, 1e-4}) {
        const double tau = cascade::theta_tail_tau(alpha, 12, budget);
        CHECK(std::isfinite(tau));
        CHECK(tau > 0.0);
        const double s12 = cascade::theta_tail_sum(alpha, 12, tau);
        const double s20 = cascade::theta_tail_sum(alpha, 20, tau);
        CHECK(s12 > 0.0);
        CHECK(s20 < s12);
    }
    // smaller budgets require larger tau
    CHECK(cascade::theta_tail_tau(alpha, 12, 1e-6) >
          cascade::theta_tail_tau(alpha, 12, 1e-2));
}

TEST_CASE("cascade: hyperexplosive subtree roots are certified and non-nested") {
    int found_any = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto r = make(3.0, seed, 24);
        const auto roots = cascade::detect_hyperexplosive(r, 2.0, 1e-4);
        for (const auto& sv : roots) {
            CHECK(sv.verdict == cascade::Verdict::hyper);
            // certification implies in particular that the truncated subtree
            // maximum already sits below the horizon
            CHECK(cascade::subtree_max_theta(r, sv.root) < 2.0);
        }
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = 0; j < roots.size(); ++j)
                if (i != j)
                    CHECK_FALSE(tree::is_ancestor(roots[i].root, roots[j].root));
        if (!roots.empty()) ++found_any;
    }
    CHECK(found_any >= 15);  // alpha=3 at t=2: explosion happens well before t

    // sub-critical scaling never certifies anything
    const auto slow = make(0.9, 3, 12);
    CHECK(cascade::detect_hyperexplosive(slow, 5.0, 1e-4).empty());
}

#include "doctest.h"

#include <set>

#include "asa/treeindex.hpp"

using namespace asa;

TEST_CASE("treeindex: root and child/parent arithmetic") {
    CHECK(tree::kRoot == 1);
    CHECK(tree::generation(tree::kRoot) == 0);
    CHECK(tree::child(tree::kRoot, 1) == 2);
    CHECK(tree::child(tree::kRoot, 2) == 3);
    CHECK(tree::parent(2) == tree::kRoot);
    CHECK(tree::parent(3) == tree::kRoot);
    for (tree::VertexId v = 1; v < 4096; ++v) {
        CHECK(tree::parent(tree::child(v, 1)) == v);
        CHECK(tree::parent(tree::child(v, 2)) == v);
        CHECK(tree::child(v, 1) + 1 == tree::child(v, 2));
    }
    CHECK_THROWS_AS(tree::parent(tree::kRoot), std::domain_error);
}

TEST_CASE("treeindex: generations fill 2^g..2^{g+1}-1") {
    for (int g = 0; g <= 12; ++g) {
        const tree::VertexId lo = tree::VertexId{1} << g;
        CHECK(tree::generation(lo) == g);
        CHECK(tree::generation(2 * lo - 1) == g);
    }
}

TEST_CASE("treeindex: path round trip") {
    for (tree::VertexId v = 1; v <= 2048; ++v) {
        const auto digits = tree::path(v);
        CHECK(static_cast<int>(digits.size()) == tree::generation(v));
        for (int d : digits) CHECK((d == 1 || d == 2));
        CHECK(tree::vertex_from_path(digits) == v);
    }
    CHECK(tree::path(tree::kRoot).empty());
    CHECK_THROWS_AS(tree::path(0), std::domain_error);
    CHECK_THROWS_AS(tree::vertex_from_path({1, 3}), std::domain_error);
}

TEST_CASE("treeindex: strict ancestry matches the parent chain") {
    for (tree::VertexId v = 2; v <= 512; ++v) {
        std::set<tree::VertexId> ancestors;
        for (tree::VertexId a = tree::parent(v);; a = tree::parent(a)) {
            ancestors.insert(a);
            if (a == tree::kRoot) break;
        }
        for (tree::VertexId a = 1; a <= 512; ++a)
            CHECK(tree::is_ancestor(a, v) == (ancestors.count(a) == 1));
        CHECK_FALSE(tree::is_ancestor(v, v));
    }
}

TEST_CASE("treeindex: dyadic intervals partition by generation and nest by ancestry") {
    for (int g = 1; g <= 8; ++g) {
        const tree::VertexId lo = tree::VertexId{1} << g;
        for (tree::VertexId v = lo; v < 2 * lo; ++v) {
            const auto iv = tree::dyadic_interval(v);
            CHECK(iv.k == g);
            CHECK(iv.num == v - lo);
            // siblings tile the parent's interval
            const auto p = tree::dyadic_interval(tree::parent(v));
            CHECK(p.left() <= iv.left());
            CHECK(iv.right() <= p.right());
            const auto l = tree::dyadic_interval(tree::child(v, 1));
            const auto r = tree::dyadic_interval(tree::child(v, 2));
            CHECK(l.right() == r.left());
            CHECK(l.left() == iv.left());
            CHECK(r.right() == iv.right());
        }
    }
    CHECK(tree::dyadic_interval(tree::kRoot).left() == 0.0);
    CHECK(tree::dyadic_interval(tree::kRoot).right() == 1.0);
}

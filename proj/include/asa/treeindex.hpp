#pragma once

// Serial (heap-style) labeling of the rooted infinite binary tree:
// root = 1, children of j are 2j and 2j+1, parent is floor(j/2).
// The path form over digits {1,2} and the dyadic-interval embedding are
// derived views.  Everything here is pure integer arithmetic.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace asa::tree {

using VertexId = std::uint64_t;

inline constexpr VertexId kRoot = 1;

// |v|: the root has generation 0, serials 2^g .. 2^{g+1}-1 sit at generation g.
constexpr int generation(VertexId v) {
    return std::bit_width(v) - 1;
}

constexpr VertexId parent(VertexId v) {
    if (v < 2) throw std::domain_error("treeindex: root has no parent");
    return v >> 1;
}

// digit in {1,2}
constexpr VertexId child(VertexId v, int digit) {
    return 2 * v + static_cast<VertexId>(digit - 1);
}

// Label sequence (v_1,...,v_g) in {1,2}^g; empty for the root.
inline std::vector<int> path(VertexId v) {
    if (v == 0) throw std::domain_error("treeindex: serial 0 is not a vertex");
    const int g = generation(v);
    std::vector<int> digits(static_cast<std::size_t>(g));
    for (int j = g - 1; j >= 0; --j) {
        digits[static_cast<std::size_t>(j)] = static_cast<int>(v & 1u) + 1;
        v >>= 1;
    }
    return digits;
}

inline VertexId vertex_from_path(const std::vector<int>& digits) {
    VertexId v = kRoot;
    for (int d : digits) {
        if (d != 1 && d != 2) throw std::domain_error("treeindex: path digit outside {1,2}");
        v = child(v, d);
    }
    return v;
}

// strict ancestry: a is a proper prefix of d
constexpr bool is_ancestor(VertexId a, VertexId d) {
    const int ga = generation(a), gd = generation(d);
    return gd > ga && (d >> (gd - ga)) == a;
}

// J_v = [num/2^k, (num+1)/2^k] with k = |v|.  Endpoints are exact integer
// pairs so that sibling/parent partition identities hold with no rounding:
// the bits of v below its leading 1 are precisely the numerator.
struct DyadicInterval {
    std::uint64_t num = 0;  // left endpoint numerator
    int k = 0;              // denominator exponent: width = 2^-k

    double left() const { return static_cast<double>(num) * std::pow(2.0, -k); }
    double right() const { return static_cast<double>(num + 1) * std::pow(2.0, -k); }
    friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

constexpr DyadicInterval dyadic_interval(VertexId v) {
    const int g = generation(v);
    return DyadicInterval{v - (VertexId{1} << g), g};
}

}  // namespace asa::tree

#pragma once

// Counter-based randomness: every variate is a pure function of (seed, counter).
// There is no generator state, so any worker may ask for clock #j of sample #k
// in any order and always gets the same bits.  This is what makes lazy
// infinite-tree sampling, common random numbers across parameter families, and
// worker-count-independent reproducibility work.

#include <cstdint>
#include <cmath>
#include <numbers>

namespace asa::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer (Steele/Lea/Flood): bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// SplitMix64 stream `seed`, evaluated at position `n` (random access).
constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t n) noexcept {
    return mix64(seed + kGolden * (n + 1));
}

// Derive an independent child stream, e.g. per-sample sub-seeds.  The second
// mix round decorrelates derive(s, k) from the positions of stream s itself.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t key) noexcept {
    return mix64(mix64(seed + kGolden * (key + 1)) + kGolden);
}

// Uniform in (0,1) with 52-bit resolution.  The offset keeps 0 and 1 strictly
// out of range and every intermediate exactly representable.
constexpr double uniform01(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 12) * 0x1.0p-52 + 0x1.0p-53;
}

// Mean-one exponential via inverse CDF.
inline double exp1(std::uint64_t bits) noexcept {
    return -std::log1p(-uniform01(bits));
}

// Hard ceiling of exp1: uniform01 never exceeds 1 - 2^-53, so no clock can be
// larger than 53*ln2 ~ 36.74.  Branch-and-bound pruning over cascade subtrees
// relies on this bound being deterministic.  (The truncated tail mass,
// P(Exp(1) > 53 ln 2) ~ 1e-16, is far below every statistical tolerance used.)
inline constexpr double kClockCeiling = 36.75;

}  // namespace asa::rng

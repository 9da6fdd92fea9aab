#pragma once

// Monte Carlo estimators over time grids, with reproducibility as a hard
// requirement: results are identical bytes for any worker count. Samples
// are processed in fixed blocks of 64; each block accumulates its own
// moments, and blocks are combined serially in index order after all
// workers finish.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asa/processes.hpp"

namespace asa::montecarlo {

struct TimeGrid {
    struct Range {
        double lo = 0.0;
        double hi = 1.0;
        int count = 10;  // nodes contributed by this range
    };
    std::vector<Range> ranges;
    std::vector<double> nodes;

    // index of the range a node position belongs to
    int range_of(std::size_t node_index) const;
};

enum class GridPreset { pantograph_71, riccati_72 };

// First range contributes an explicit 0 node plus count-1 log-spaced nodes
// from hi/1000 up to hi; later ranges contribute count log-spaced nodes in
// (lo, hi], excluding the seam lo itself.
TimeGrid build_grid(const std::vector<TimeGrid::Range>& ranges);
TimeGrid build_grid(GridPreset preset);

struct EstimateTable {
    std::vector<double> nodes;
    std::vector<double> mean;
    std::vector<double> std_err;  // sqrt(sample variance / n)
    std::vector<long> count;
    // diagnostic only: how many samples were exactly 0 at each node (no
    // accuracy claim attaches to it; excluded from the CSV)
    std::vector<long> zero_count;
    std::uint64_t seed = 0;
    std::string digest;  // canonical description of what was estimated

    // header "t,mean,stderr,n", rows in %.17g
    void write_csv(std::ostream& os) const;
    static EstimateTable read_csv(std::istream& is);
};

// Pools two tables sample-stream-wise: same nodes and digest required,
// caller guarantees the seeds drove disjoint streams.
EstimateTable merge(const EstimateTable& a, const EstimateTable& b);

// Mean of process_value over n_samples realizations (sample k uses cascade
// seed derive(seed, k)), one column per grid node.
EstimateTable estimate_expectation(const processes::ProcessSpec& spec,
                                   const TimeGrid& grid, long n_samples,
                                   std::uint64_t seed, int workers = 1);

// Transformed family sharing realizations across lambdas (common random
// numbers): the base iterate is computed once per sample and node, then
// each lambda's transform is applied. base.transform.kind selects the
// family (exponential or power); its lambda field is ignored.
std::vector<EstimateTable> estimate_u_lambda_family(
    const processes::ProcessSpec& base, const std::vector<double>& lambdas,
    const TimeGrid& grid, long n_samples, std::uint64_t seed,
    int workers = 1);

// Single-path estimators for the algebraically-decaying pantograph solution
// and its two derived quantities, estimated per grid range with its own
// sample budget (n_per_range must match grid.ranges in length, or be empty
// for the defaults 10000/3000/2000/...):
//   eta:       mean of X(t)
//   eta_prime: mean of a X(alpha t) - X(t)   (same path)
//   eta_sum:   mean of sum_{i=1..k_bar} (alpha/a)^i X(alpha^{-i} t)
struct EtaFamily {
    EstimateTable eta;
    EstimateTable eta_prime;
    EstimateTable eta_sum;
};
EtaFamily estimate_eta_family(double alpha, double a, const TimeGrid& grid,
                              std::vector<long> n_per_range,
                              std::uint64_t seed, int k_trunc = 15,
                              int k_bar = 6, int workers = 1);

}  // namespace asa::montecarlo

#include "asa/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "asa/rng.hpp"

namespace asa::montecarlo {

namespace {

// Samples are processed in fixed blocks of 64 regardless of worker count;
// block accumulators are folded in block-index order, so the result is a
// pure function of (seed, n_samples) and identical bytes for any worker
// count.
constexpr long kBlock = 64;

struct Accum {
    long double mean = 0.0L;
    long double m2 = 0.0L;
    long n = 0;
    long zeros = 0;

    void add(double x) {
        ++n;
        const long double d = static_cast<long double>(x) - mean;
        mean += d / n;
        m2 += d * (static_cast<long double>(x) - mean);
        if (x == 0.0) ++zeros;
    }
};

void fold(Accum& a, const Accum& b) {
    if (b.n == 0) return;
    if (a.n == 0) {
        a = b;
        return;
    }
    const long double na = a.n, nb = b.n, n = na + nb;
    const long double d = b.mean - a.mean;
    a.m2 += b.m2 + d * d * na * nb / n;
    a.mean += d * nb / n;
    a.n += b.n;
    a.zeros += b.zeros;
}

// block_fn fills `width` accumulators from the sample index range [k0, k1).
void run_blocks(long n_samples, int workers, std::size_t width,
                const std::function<void(long, long, std::vector<Accum>&)>& block_fn,
                std::vector<Accum>& out) {
    out.assign(width, Accum{});
    const long n_blocks = (n_samples + kBlock - 1) / kBlock;
    if (workers <= 1) {
        std::vector<Accum> local;
        for (long b = 0; b < n_blocks; ++b) {
            local.assign(width, Accum{});
            block_fn(b * kBlock, std::min(n_samples, (b + 1) * kBlock), local);
            for (std::size_t i = 0; i < width; ++i) fold(out[i], local[i]);
        }
        return;
    }
    std::atomic<long> next{0};
    std::mutex mu;
    std::map<long, std::vector<Accum>> parked;
    long fold_next = 0;
    auto worker = [&] {
        std::vector<Accum> local;
        for (;;) {
            const long b = next.fetch_add(1);
            if (b >= n_blocks) return;
            local.assign(width, Accum{});
            block_fn(b * kBlock, std::min(n_samples, (b + 1) * kBlock), local);
            std::lock_guard<std::mutex> lk(mu);
            parked.emplace(b, std::move(local));
            // fold every block that is now contiguous with the frontier
            for (auto it = parked.begin();
                 it != parked.end() && it->first == fold_next;
                 it = parked.erase(it), ++fold_next) {
                for (std::size_t i = 0; i < width; ++i) fold(out[i], it->second[i]);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (!parked.empty())
        throw std::logic_error("montecarlo: block fold frontier stalled");
}

void finalize_column(const Accum& a, double& mean, double& se, long& n,
                     long& zeros) {
    n = a.n;
    zeros = a.zeros;
    mean = static_cast<double>(a.mean);
    se = a.n >= 2 ? static_cast<double>(
                        sqrtl(a.m2 / static_cast<long double>(a.n - 1) / a.n))
                  : 0.0;
}

EstimateTable make_table(const TimeGrid& grid, const std::vector<Accum>& acc,
                         std::uint64_t seed, std::string digest) {
    EstimateTable t;
    t.nodes = grid.nodes;
    const std::size_t k = grid.nodes.size();
    t.mean.resize(k);
    t.std_err.resize(k);
    t.count.resize(k);
    t.zero_count.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        finalize_column(acc[i], t.mean[i], t.std_err[i], t.count[i],
                        t.zero_count[i]);
    t.seed = seed;
    t.digest = std::move(digest);
    return t;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string describe_ground(const processes::GroundState& g) {
    using K = processes::GroundState::Kind;
    switch (g.kind) {
        case K::constant:
            return "constant(" + fmt(g.delta) + ")";
        case K::rho:
            return "rho(m=" + fmt(g.m) + ",delta=" + fmt(g.delta) +
                   ",gamma=" + fmt(g.gamma) + ")";
        case K::athreya_mu:
            return "athreya_mu(gamma=" + fmt(g.gamma) + ")";
        case K::athreya_ga:
            return "athreya_ga(gamma=" + fmt(g.gamma) + ")";
        case K::tabulated: {
            std::string s = "tabulated(n=" + std::to_string(g.table.nodes().size());
            if (!g.table.nodes().empty())
                s += ",last=" + fmt(g.table.nodes().back()) + ",v0=" +
                     fmt(g.table.values().front());
            return s + ")";
        }
    }
    return "?";
}

std::string describe_transform(const processes::Transform& tr) {
    using K = processes::Transform::Kind;
    switch (tr.kind) {
        case K::none:
            return "none";
        case K::exponential:
            return "exp(" + fmt(tr.lambda) + ")";
        case K::power:
            return "power(" + fmt(tr.lambda) + ")";
        case K::product_with_maximal:
            return "product_with_maximal(u0=" + fmt(tr.u0) + ")";
    }
    return "?";
}

std::string describe_spec(const processes::ProcessSpec& spec) {
    std::string s = spec.equation == processes::Equation::pantograph
                        ? "pantograph(a=" + fmt(spec.a) + ")"
                        : "riccati";
    s += " alpha=" + fmt(spec.alpha);
    s += " ground=" + describe_ground(spec.ground);
    s += " u0_or_w0=" + fmt(spec.u0_or_w0);
    s += " n=" + std::to_string(spec.generations);
    s += " transform=" + describe_transform(spec.transform);
    s += " depth=" + std::to_string(spec.max_depth);
    return s;
}

std::string describe_grid(const TimeGrid& grid) {
    std::string s = "grid=";
    for (const auto& r : grid.ranges)
        s += "[" + fmt(r.lo) + "," + fmt(r.hi) + "," + std::to_string(r.count) + "]";
    return s;
}

processes::ProcessSpec without_transform(const processes::ProcessSpec& spec) {
    processes::ProcessSpec raw = spec;
    raw.transform = processes::Transform::none();
    return raw;
}

}  // namespace

int TimeGrid::range_of(std::size_t node_index) const {
    std::size_t seen = 0;
    for (std::size_t r = 0; r < ranges.size(); ++r) {
        seen += static_cast<std::size_t>(ranges[r].count);
        if (node_index < seen) return static_cast<int>(r);
    }
    throw std::out_of_range("grid: node index past the last range");
}

TimeGrid build_grid(const std::vector<TimeGrid::Range>& ranges) {
    if (ranges.empty()) throw std::invalid_argument("grid: no ranges");
    TimeGrid g;
    g.ranges = ranges;
    for (std::size_t r = 0; r < ranges.size(); ++r) {
        const auto& rg = ranges[r];
        if (!(rg.hi > rg.lo) || rg.count < 1)
            throw std::invalid_argument("grid: bad range");
        if (r > 0 && !(rg.lo >= ranges[r - 1].hi))
            throw std::invalid_argument("grid: ranges must ascend");
        if (r == 0 && rg.lo == 0.0) {
            // leading range: explicit 0 plus log-spaced coverage of (0, hi]
            g.nodes.push_back(0.0);
            const int k = rg.count - 1;
            if (k > 0) {
                const double lo = rg.hi / 1000.0;
                for (int i = 0; i < k; ++i)
                    g.nodes.push_back(
                        k == 1 ? rg.hi
                               : lo * std::pow(rg.hi / lo,
                                               static_cast<double>(i) / (k - 1)));
                g.nodes.back() = rg.hi;  // pin the seam exactly
            }
        } else if (r == 0) {
            // log-spaced, both endpoints included
            for (int i = 0; i < rg.count; ++i)
                g.nodes.push_back(
                    rg.count == 1
                        ? rg.hi
                        : rg.lo * std::pow(rg.hi / rg.lo,
                                           static_cast<double>(i) / (rg.count - 1)));
            g.nodes.back() = rg.hi;
        } else {
            // (lo, hi]: log-spaced excluding the seam node itself
            for (int i = 1; i <= rg.count; ++i)
                g.nodes.push_back(rg.lo * std::pow(rg.hi / rg.lo,
                                                   static_cast<double>(i) /
                                                       rg.count));
            g.nodes.back() = rg.hi;
        }
    }
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        if (!(g.nodes[i] > g.nodes[i - 1]))
            throw std::invalid_argument("grid: nodes failed to ascend");
    return g;
}

TimeGrid build_grid(GridPreset preset) {
    switch (preset) {
        case GridPreset::pantograph_71:
            return build_grid({{0.0, 2.5, 80}, {2.5, 5.7, 10}, {5.7, 12.0, 10}});
        case GridPreset::riccati_72:
            return build_grid({{0.0, 1.0, 10}, {1.0, 11.0, 25}, {11.0, 111.0, 25}});
    }
    throw std::invalid_argument("grid: unknown preset");
}

void EstimateTable::write_csv(std::ostream& os) const {
    os << "t,mean,stderr,n\n";
    char buf[160];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%ld\n", nodes[i],
                      mean[i], std_err[i], count[i]);
        os << buf;
    }
}

EstimateTable EstimateTable::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "t,mean,stderr,n")
        throw std::runtime_error("estimate table: bad csv header");
    EstimateTable t;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error("estimate table: short csv row");
            vals[c] = std::stod(cell);
        }
        if (!std::getline(row, cell))
            throw std::runtime_error("estimate table: short csv row");
        t.nodes.push_back(vals[0]);
        t.mean.push_back(vals[1]);
        t.std_err.push_back(vals[2]);
        t.count.push_back(std::stol(cell));
        t.zero_count.push_back(0);
    }
    return t;
}

EstimateTable merge(const EstimateTable& a, const EstimateTable& b) {
    if (a.digest != b.digest)
        throw std::invalid_argument("merge: tables estimate different things");
    if (a.nodes != b.nodes)
        throw std::invalid_argument("merge: tables live on different grids");
    EstimateTable out = a;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        Accum acc;
        acc.mean = a.mean[i];
        acc.m2 = static_cast<long double>(a.std_err[i]) * a.std_err[i] *
                 a.count[i] * (a.count[i] - 1);
        acc.n = a.count[i];
        acc.zeros = a.zero_count.empty() ? 0 : a.zero_count[i];
        Accum bc;
        bc.mean = b.mean[i];
        bc.m2 = static_cast<long double>(b.std_err[i]) * b.std_err[i] *
                b.count[i] * (b.count[i] - 1);
        bc.n = b.count[i];
        bc.zeros = b.zero_count.empty() ? 0 : b.zero_count[i];
        fold(acc, bc);
        finalize_column(acc, out.mean[i], out.std_err[i], out.count[i],
                        out.zero_count[i]);
    }
    return out;
}

EstimateTable estimate_expectation(const processes::ProcessSpec& spec,
                                   const TimeGrid& grid, long n_samples,
                                   std::uint64_t seed, int workers) {
    if (n_samples < 2)
        throw std::invalid_argument("estimate: need at least 2 samples");
    const std::size_t width = grid.nodes.size();
    std::vector<Accum> acc;
    run_blocks(
        n_samples, workers, width,
        [&](long k0, long k1, std::vector<Accum>& local) {
            for (long k = k0; k < k1; ++k) {
                cascade::CascadeParams p;
                p.alpha = spec.alpha;
                p.seed = rng::derive(seed, static_cast<std::uint64_t>(k));
                p.max_depth = spec.max_depth;
                const cascade::CascadeRealization r(p);
                for (std::size_t i = 0; i < width; ++i)
                    local[i].add(processes::process_value(r, spec, grid.nodes[i]));
            }
        },
        acc);
    // sample count deliberately excluded: tables from disjoint sample streams
    // of the same quantity must stay mergeable
    return make_table(grid, acc, seed,
                      "expectation " + describe_spec(spec) + " " +
                          describe_grid(grid));
}

std::vector<EstimateTable> estimate_u_lambda_family(
    const processes::ProcessSpec& base, const std::vector<double>& lambdas,
    const TimeGrid& grid, long n_samples, std::uint64_t seed, int workers) {
    if (n_samples < 2)
        throw std::invalid_argument("estimate: need at least 2 samples");
    if (lambdas.empty())
        throw std::invalid_argument("family: no lambdas");
    using K = processes::Transform::Kind;
    const K kind = base.transform.kind;
    if (kind != K::exponential && kind != K::power)
        throw std::invalid_argument("family: transform must be exponential or power");
    std::vector<processes::Transform> transforms;
    transforms.reserve(lambdas.size());
    for (double l : lambdas)
        transforms.push_back(kind == K::exponential
                                 ? processes::Transform::exponential(l)
                                 : processes::Transform::power(l));
    const processes::ProcessSpec raw = without_transform(base);
    const std::size_t n_nodes = grid.nodes.size();
    const std::size_t n_lam = lambdas.size();
    std::vector<Accum> acc;
    run_blocks(
        n_samples, workers, n_nodes * n_lam,
        [&](long k0, long k1, std::vector<Accum>& local) {
            for (long k = k0; k < k1; ++k) {
                cascade::CascadeParams p;
                p.alpha = base.alpha;
                p.seed = rng::derive(seed, static_cast<std::uint64_t>(k));
                p.max_depth = base.max_depth;
                const cascade::CascadeRealization r(p);
                for (std::size_t i = 0; i < n_nodes; ++i) {
                    // one shared base value per (sample, node): common random
                    // numbers across the whole lambda family
                    const double x =
                        processes::process_value(r, raw, grid.nodes[i]);
                    for (std::size_t l = 0; l < n_lam; ++l)
                        local[l * n_nodes + i].add(
                            processes::apply_transform(x, transforms[l]));
                }
            }
        },
        acc);
    std::vector<EstimateTable> out;
    out.reserve(n_lam);
    for (std::size_t l = 0; l < n_lam; ++l) {
        std::vector<Accum> col(acc.begin() + static_cast<std::ptrdiff_t>(l * n_nodes),
                               acc.begin() + static_cast<std::ptrdiff_t>((l + 1) * n_nodes));
        out.push_back(make_table(
            grid, col, seed,
            "family " + describe_spec(base) + " lambda=" + fmt(lambdas[l]) +
                " " + describe_grid(grid)));
    }
    return out;
}

EtaFamily estimate_eta_family(double alpha, double a, const TimeGrid& grid,
                              std::vector<long> n_per_range,
                              std::uint64_t seed, int k_trunc, int k_bar,
                              int workers) {
    if (!(a > 1.0) || !(alpha > a))
        throw std::invalid_argument("eta family: requires 1 < a < alpha");
    if (k_trunc < 1 || k_bar < 1)
        throw std::invalid_argument("eta family: bad truncation");
    if (n_per_range.empty()) {
        n_per_range = {10000, 3000, 2000};
        n_per_range.resize(grid.ranges.size(),
                           n_per_range.back());  // pad with the last budget
    }
    if (n_per_range.size() != grid.ranges.size())
        throw std::invalid_argument("eta family: one sample budget per range");
    const double gamma_a = std::log(a) / std::log(alpha);

    const std::size_t n_nodes = grid.nodes.size();
    std::vector<Accum> total(3 * n_nodes, Accum{});
    for (std::size_t rix = 0; rix < grid.ranges.size(); ++rix) {
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i < n_nodes; ++i)
            if (grid.range_of(i) == static_cast<int>(rix)) cols.push_back(i);
        if (cols.empty()) continue;
        const std::uint64_t range_seed =
            rng::derive(seed, 1000 + static_cast<std::uint64_t>(rix));
        std::vector<Accum> acc;
        run_blocks(
            n_per_range[rix], workers, 3 * cols.size(),
            [&](long k0, long k1, std::vector<Accum>& local) {
                for (long k = k0; k < k1; ++k) {
                    const std::uint64_t s_seed =
                        rng::derive(range_seed, static_cast<std::uint64_t>(k));
                    const double s =
                        processes::unary_explosion_sample(s_seed, alpha, k_trunc)
                            .s_lower;
                    auto path_value = [&](double arg) {
                        return s < arg ? std::pow(arg - s, -gamma_a) : 0.0;
                    };
                    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
                        const double t = grid.nodes[cols[ci]];
                        const double xt = path_value(t);
                        local[ci].add(xt);
                        local[cols.size() + ci].add(a * path_value(alpha * t) - xt);
                        double w = 0.0;
                        double coeff = 1.0;
                        double arg = t;
                        for (int i = 1; i <= k_bar; ++i) {
                            coeff *= alpha / a;
                            arg /= alpha;
                            w += coeff * path_value(arg);
                        }
                        local[2 * cols.size() + ci].add(w);
                    }
                }
            },
            acc);
        for (std::size_t ci = 0; ci < cols.size(); ++ci)
            for (int e = 0; e < 3; ++e)
                total[static_cast<std::size_t>(e) * n_nodes + cols[ci]] =
                    acc[static_cast<std::size_t>(e) * cols.size() + ci];
    }

    // sample budgets deliberately excluded so re-runs with more samples merge
    const std::string desc = "eta-family alpha=" + fmt(alpha) + " a=" + fmt(a) +
                             " k_trunc=" + std::to_string(k_trunc) +
                             " k_bar=" + std::to_string(k_bar) + " " +
                             describe_grid(grid);

    EtaFamily fam;
    std::vector<Accum> col(total.begin(), total.begin() + static_cast<std::ptrdiff_t>(n_nodes));
    fam.eta = make_table(grid, col, seed, desc + " est=eta");
    col.assign(total.begin() + static_cast<std::ptrdiff_t>(n_nodes),
               total.begin() + static_cast<std::ptrdiff_t>(2 * n_nodes));
    fam.eta_prime = make_table(grid, col, seed, desc + " est=eta_prime");
    col.assign(total.begin() + static_cast<std::ptrdiff_t>(2 * n_nodes), total.end());
    fam.eta_sum = make_table(grid, col, seed, desc + " est=eta_sum");
    return fam;
}

}  // namespace asa::montecarlo

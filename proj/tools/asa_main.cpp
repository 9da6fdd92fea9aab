// Experiment runner for the cascade toolkit. Every subcommand reads a flat
// key=value config (INI-like text or a flat JSON object), lets command-line
// flags override individual keys, writes the fully resolved config next to
// its outputs, and emits CSV tables / JSON summaries / gnuplot .dat files.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
// certification failure (an internal tolerance or admissibility check that
// did not pass at run time).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "asa/cascade.hpp"
#include "asa/montecarlo.hpp"
#include "asa/picard.hpp"
#include "asa/processes.hpp"
#include "asa/quadrature.hpp"
#include "asa/rng.hpp"
#include "asa/series.hpp"
#include "asa/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace asa;

namespace {

// ---------------------------------------------------------------------------
// config plumbing

using KV = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

KV load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    KV kv;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const json j = json::parse(text);
        if (!j.is_object())
            throw std::invalid_argument("config: JSON root must be an object");
        for (const auto& [k, v] : j.items()) {
            if (v.is_string())
                kv[k] = v.get<std::string>();
            else
                kv[k] = v.dump();
        }
        return kv;
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key = value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

// typed access to the resolved key/value map
struct Params {
    std::string command;
    KV kv;

    const std::string& str(const std::string& k) const {
        const auto it = kv.find(k);
        if (it == kv.end())
            throw std::invalid_argument("config: missing key " + k);
        return it->second;
    }
    double num(const std::string& k) const {
        const std::string& s = str(k);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: " + k + " is not a number: " + s);
        }
        if (used != s.size())
            throw std::invalid_argument("config: " + k + " is not a number: " + s);
        return v;
    }
    long integer(const std::string& k) const {
        const std::string& s = str(k);
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: " + k + " is not an integer: " + s);
        }
        if (used != s.size())
            throw std::invalid_argument("config: " + k + " is not an integer: " + s);
        return v;
    }
    std::uint64_t uinteger(const std::string& k) const {
        const std::string& s = str(k);
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: " + k +
                                        " is not an unsigned integer: " + s);
        }
        if (used != s.size())
            throw std::invalid_argument("config: " + k +
                                        " is not an unsigned integer: " + s);
        return v;
    }
    std::vector<double> numbers(const std::string& k) const {
        std::vector<double> out;
        std::istringstream ss(str(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            Params one{command, {{"x", item}}};
            out.push_back(one.num("x"));
        }
        return out;
    }
    std::vector<long> integers(const std::string& k) const {
        std::vector<long> out;
        std::istringstream ss(str(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            Params one{command, {{"x", item}}};
            out.push_back(one.integer("x"));
        }
        return out;
    }
};

std::string default_seed() {
    if (const char* env = std::getenv("ASA_SEED")) return env;
    return "12345";
}

// defaults < config file < command-line flags; rejects unknown file keys
Params resolve(const std::string& command, const KV& defaults,
               const std::string& config_path, const KV& cli) {
    Params p;
    p.command = command;
    p.kv = defaults;
    if (!config_path.empty()) {
        for (const auto& [k, v] : load_config_file(config_path)) {
            if (k == "command") {
                if (v != command)
                    throw std::invalid_argument("config: file is for command '" +
                                                v + "', not '" + command + "'");
                continue;
            }
            if (!p.kv.count(k))
                throw std::invalid_argument("config: unknown key " + k);
            p.kv[k] = v;
        }
    }
    for (const auto& [k, v] : cli) p.kv[k] = v;
    return p;
}

fs::path ensure_out_dir(Params& p, const std::string& fallback) {
    if (p.kv["out"].empty()) p.kv["out"] = "out/" + fallback;
    const fs::path dir = p.kv["out"];
    fs::create_directories(dir);
    return dir;
}

void write_resolved(const Params& p, const fs::path& dir) {
    std::ofstream os(dir / "resolved.cfg");
    os << "command = " << p.command << "\n";
    for (const auto& [k, v] : p.kv) os << k << " = " << v << "\n";
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo))
        throw std::invalid_argument("grid: need at least 2 points, hi > lo");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

std::vector<double> geomspace(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("grid: geometric range needs 0 < lo < hi");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            lo * std::exp(ratio * i / (n - 1));
    out.back() = hi;
    return out;
}

// "pantograph_71" | "riccati_72" | "lo:hi:count,lo:hi:count,..."
montecarlo::TimeGrid parse_grid(const std::string& s) {
    if (s == "pantograph_71")
        return montecarlo::build_grid(montecarlo::GridPreset::pantograph_71);
    if (s == "riccati_72")
        return montecarlo::build_grid(montecarlo::GridPreset::riccati_72);
    std::vector<montecarlo::TimeGrid::Range> ranges;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double lo = 0.0, hi = 0.0;
        int count = 0;
        if (std::sscanf(item.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3)
            throw std::invalid_argument("grid: bad range '" + item +
                                        "', want lo:hi:count");
        ranges.push_back({lo, hi, count});
    }
    return montecarlo::build_grid(ranges);
}

// "constant:<c>" | "rho:<m>:<delta>" | "mu" | "ga" | "eta" | "eta:<iters>"
processes::GroundState parse_ground(const std::string& s, double alpha) {
    const double gamma = series::gamma_exponent(alpha);
    std::vector<std::string> parts;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.empty()) throw std::invalid_argument("ground: empty spec");
    auto as_num = [](const std::string& v, const char* what) {
        Params one{"", {{"x", v}}};
        try {
            return one.num("x");
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("ground: bad ") + what +
                                        " '" + v + "'");
        }
    };
    if (parts[0] == "constant" && parts.size() == 2)
        return processes::GroundState::constant(as_num(parts[1], "constant"));
    if (parts[0] == "rho" && parts.size() == 3)
        return processes::GroundState::rho(as_num(parts[1], "threshold"),
                                           as_num(parts[2], "coefficient"),
                                           gamma);
    if (parts[0] == "mu" && parts.size() == 1)
        return processes::GroundState::athreya_mu(gamma);
    if (parts[0] == "ga" && parts.size() == 1)
        return processes::GroundState::athreya_ga(gamma);
    if (parts[0] == "eta" && parts.size() <= 2) {
        const int iters =
            parts.size() == 2
                ? static_cast<int>(as_num(parts[1], "iteration count"))
                : 2;
        // binary branching pins the table's decay weight at a = 2
        const auto grid = geomspace(0.02, 60.0, 90);
        return processes::GroundState::tabulated(
            picard::eta_table(2.0, alpha, iters, grid));
    }
    throw std::invalid_argument("ground: unrecognized spec '" + s + "'");
}

void write_table_csv(const montecarlo::EstimateTable& t, const fs::path& path) {
    std::ofstream os(path);
    t.write_csv(os);
}

montecarlo::EstimateTable read_table_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("table: cannot open " + path);
    return montecarlo::EstimateTable::read_csv(is);
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_series(Params p) {
    const fs::path dir = ensure_out_dir(p, "series");
    write_resolved(p, dir);
    const std::string curve = p.str("curve");
    series::SeriesParams sp;
    sp.a = p.num("a");
    sp.alpha = p.num("alpha");
    sp.w0 = p.num("w0");
    sp.tol = p.num("tol");
    const auto ts = linspace(p.num("t_lo"), p.num("t_hi"),
                             static_cast<int>(p.integer("points")));
    std::ofstream os(dir / "series.csv");
    os << "t,value\n";
    for (double t : ts) {
        double v = 0.0;
        if (curve == "pantograph")
            v = series::pantograph_series(t, sp);
        else if (curve == "explosion_ccdf")
            v = series::explosion_ccdf(t, sp.alpha, sp.tol);
        else if (curve == "explosion_pdf")
            v = series::explosion_pdf(t, sp.alpha, sp.tol);
        else
            throw std::invalid_argument("series: unknown curve " + curve);
        os << fmt17(t) << "," << fmt17(v) << "\n";
    }
    json summary = {{"command", "series"},
                    {"curve", curve},
                    {"a", sp.a},
                    {"alpha", sp.alpha},
                    {"w0", sp.w0},
                    {"points", ts.size()},
                    {"files", {"series.csv"}}};
    write_json(summary, dir / "summary.json");
    std::cout << "series: wrote " << (dir / "series.csv").string() << " ("
              << ts.size() << " nodes)\n";
    return 0;
}

int cmd_picard(Params p) {
    const fs::path dir = ensure_out_dir(p, "picard");
    write_resolved(p, dir);
    const double a = p.num("a");
    const double alpha = p.num("alpha");
    const int n_iter = static_cast<int>(p.integer("n_iter"));
    const auto grid = geomspace(p.num("grid_lo"), p.num("grid_hi"),
                                static_cast<int>(p.integer("grid_points")));
    const auto eta = picard::eta_table(a, alpha, n_iter, grid, p.num("t_patch"));
    {
        std::ofstream os(dir / "eta_table.csv");
        eta.write_csv(os);
    }
    const auto probes = linspace(p.num("probe_lo"), p.num("probe_hi"),
                                 static_cast<int>(p.integer("probe_points")));
    const double res = picard::residual_pantograph(eta, a, alpha, 0.0, probes);
    json summary = {{"command", "picard"},
                    {"a", a},
                    {"alpha", alpha},
                    {"n_iter", n_iter},
                    {"gamma_a", series::gamma_a(a, alpha)},
                    {"residual", res},
                    {"residual_window", {probes.front(), probes.back()}},
                    {"files", {"eta_table.csv"}}};
    write_json(summary, dir / "summary.json");
    std::cout << "picard: eta table with " << n_iter
              << " iterations, equation residual " << fmtg(res) << " on ["
              << fmtg(probes.front()) << ", " << fmtg(probes.back()) << "]\n";
    return 0;
}

int cmd_simulate(Params p) {
    const fs::path dir = ensure_out_dir(p, "simulate");
    write_resolved(p, dir);
    cascade::CascadeParams cp;
    cp.alpha = p.num("alpha");
    cp.seed = p.uinteger("seed");
    cp.max_depth = static_cast<int>(p.integer("depth"));
    const cascade::CascadeRealization r(cp);
    {
        std::ofstream os(dir / "cascade.csv");
        cascade::dump_csv(r, os,
                          static_cast<int>(p.integer("dump_depth")));
    }
    const double eps = p.num("epsilon");
    const auto bounds = cascade::extreme_bounds(r, eps);
    const double t = p.num("t");
    const auto hyper = cascade::detect_hyperexplosive(r, t, eps);
    json roots = json::array();
    for (const auto& sv : hyper)
        roots.push_back({{"root", sv.root},
                         {"verdict", sv.verdict == cascade::Verdict::hyper
                                         ? "hyper"
                                         : "undecided"}});
    json summary = {{"command", "simulate"},
                    {"alpha", cp.alpha},
                    {"seed", cp.seed},
                    {"depth", cp.max_depth},
                    {"epsilon", eps},
                    {"t", t},
                    {"s_lower", finite_or_string(bounds.s_lower)},
                    {"s_upper", finite_or_string(bounds.s_upper)},
                    {"l_lower", finite_or_string(bounds.l_lower)},
                    {"l_upper", finite_or_string(bounds.l_upper)},
                    {"confidence", bounds.confidence},
                    {"hyper_roots", roots},
                    {"files", {"cascade.csv"}}};
    write_json(summary, dir / "summary.json");
    std::cout << "simulate: S in [" << fmtg(bounds.s_lower) << ", "
              << fmtg(bounds.s_upper) << "], L in [" << fmtg(bounds.l_lower)
              << ", " << fmtg(bounds.l_upper) << "], " << roots.size()
              << " hyperexplosive root(s) at t=" << fmtg(t) << "\n";
    return 0;
}

int cmd_estimate(Params p) {
    const fs::path dir = ensure_out_dir(p, "estimate");
    write_resolved(p, dir);
    const std::string family = p.str("family");
    const auto grid = parse_grid(p.str("grid"));
    const std::uint64_t seed = p.uinteger("seed");
    const int workers = static_cast<int>(p.integer("workers"));
    json summary = {{"command", "estimate"}, {"family", family}};
    std::vector<std::string> files;

    if (family == "eta") {
        std::vector<long> budgets;
        if (!trim(p.str("budgets")).empty()) budgets = p.integers("budgets");
        const auto fam = montecarlo::estimate_eta_family(
            p.num("alpha"), p.num("a"), grid, budgets, seed,
            static_cast<int>(p.integer("k_trunc")),
            static_cast<int>(p.integer("k_bar")), workers);
        write_table_csv(fam.eta, dir / "eta.csv");
        write_table_csv(fam.eta_prime, dir / "eta_prime.csv");
        write_table_csv(fam.eta_sum, dir / "eta_sum.csv");
        files = {"eta.csv", "eta_prime.csv", "eta_sum.csv"};
        summary["digest"] = fam.eta.digest;
        std::cout << "estimate: " << fam.eta.digest << "\n";
    } else if (family == "u_lambda") {
        processes::ProcessSpec base;
        const std::string eq = p.str("equation");
        if (eq == "riccati")
            base.equation = processes::Equation::riccati;
        else if (eq == "pantograph")
            base.equation = processes::Equation::pantograph;
        else
            throw std::invalid_argument("estimate: unknown equation " + eq);
        base.alpha = p.num("alpha");
        base.ground = parse_ground(p.str("ground"), base.alpha);
        base.u0_or_w0 = p.num("u0");
        base.generations = static_cast<int>(p.integer("n"));
        base.max_depth = std::max(base.generations, 1);
        const std::string tr = p.str("transform");
        if (tr == "exponential")
            base.transform = processes::Transform::exponential(1.0);
        else if (tr == "power")
            base.transform = processes::Transform::power(1.0);
        else
            throw std::invalid_argument("estimate: unknown transform " + tr);
        const auto lambdas = p.numbers("lambdas");
        const auto tables = montecarlo::estimate_u_lambda_family(
            base, lambdas, grid, p.integer("samples"), seed, workers);
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const std::string name = "u_lambda_" + fmtg(lambdas[i]) + ".csv";
            write_table_csv(tables[i], dir / name);
            files.push_back(name);
        }
        summary["digest"] = tables.front().digest;
        std::cout << "estimate: " << tables.front().digest << "\n";
    } else {
        throw std::invalid_argument("estimate: unknown family " + family);
    }
    summary["files"] = files;
    write_json(summary, dir / "summary.json");
    return 0;
}

const char* verdict_name(verify::CellVerdict v) {
    switch (v) {
        case verify::CellVerdict::to_zero: return "to_zero";
        case verify::CellVerdict::to_one: return "to_one";
        case verify::CellVerdict::diverging: return "diverging";
        case verify::CellVerdict::bounded_other: return "bounded_other";
    }
    return "?";
}

const char* class_name(verify::DecayClass c) {
    switch (c) {
        case verify::DecayClass::algebraic: return "algebraic";
        case verify::DecayClass::exponential: return "exponential";
        case verify::DecayClass::identically_zero: return "identically_zero";
        case verify::DecayClass::inconclusive: return "inconclusive";
    }
    return "?";
}

int cmd_verify(Params p) {
    const fs::path dir = ensure_out_dir(p, "verify");
    write_resolved(p, dir);
    const std::string mode = p.str("mode");
    json record = {{"command", "verify"}, {"mode", mode}};

    if (mode == "rate") {
        const auto table = read_table_csv(p.str("table"));
        const auto fit = verify::rate_fit(table, p.num("gamma"),
                                          p.num("window_lo"), p.num("window_hi"));
        record["slope"] = fit.slope;
        record["slope_ci"] = {fit.slope_ci[0], fit.slope_ci[1]};
        record["level"] = fit.level;
        record["level_ci"] = {fit.level_ci[0], fit.level_ci[1]};
        record["nodes_used"] = fit.nodes_used;
        std::printf("rate fit on [%g, %g]: slope %.4f  [%.4f, %.4f]\n",
                    fit.window_lo, fit.window_hi, fit.slope, fit.slope_ci[0],
                    fit.slope_ci[1]);
        std::printf("pinned-slope level:   %.4f  [%.4f, %.4f]  (%d nodes)\n",
                    fit.level, fit.level_ci[0], fit.level_ci[1],
                    fit.nodes_used);
    } else if (mode == "tail") {
        const std::string source = p.str("source");
        const double alpha = p.num("alpha");
        const long n = p.integer("samples");
        const std::uint64_t seed = p.uinteger("seed");
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(n));
        if (source == "explosion") {
            const int k_trunc = static_cast<int>(p.integer("k_trunc"));
            for (long k = 0; k < n; ++k)
                xs.push_back(processes::unary_explosion_sample(
                                 rng::derive(seed, static_cast<std::uint64_t>(k)),
                                 alpha, k_trunc)
                                 .s_lower);
        } else if (source == "hyper") {
            cascade::CascadeParams cp;
            cp.alpha = alpha;
            cp.max_depth = static_cast<int>(p.integer("depth"));
            for (long k = 0; k < n; ++k) {
                cp.seed = rng::derive(seed, static_cast<std::uint64_t>(k));
                xs.push_back(cascade::truncated_max_theta(
                    cascade::CascadeRealization(cp)));
            }
        } else {
            throw std::invalid_argument("verify: unknown tail source " + source);
        }
        const double slope =
            verify::tail_slope(xs, p.num("window_lo"), p.num("window_hi"));
        record["source"] = source;
        record["samples"] = n;
        record["slope"] = slope;
        std::printf("tail slope of %s times on [%g, %g]: %.4f  (N=%ld)\n",
                    source.c_str(), p.num("window_lo"), p.num("window_hi"),
                    slope, n);
    } else if (mode == "classify") {
        auto table = read_table_csv(p.str("table"));
        if (p.str("complement") == "true")
            for (auto& m : table.mean) m = 1.0 - m;
        const auto cls = verify::decay_classify(table, p.num("gamma"));
        record["class"] = class_name(cls);
        std::printf("decay class: %s\n", class_name(cls));
    } else if (mode == "matrix") {
        const auto raw = p.numbers("cells");
        if (raw.empty() || raw.size() % 2 != 0)
            throw std::invalid_argument(
                "verify: cells must be u0,delta pairs, e.g. 0,1,0.5,2");
        std::vector<std::pair<double, double>> cells;
        for (std::size_t i = 0; i + 1 < raw.size(); i += 2)
            cells.emplace_back(raw[i], raw[i + 1]);
        const auto matrix = verify::ground_state_matrix(
            p.num("alpha"), cells, p.num("t_probe"), p.integer("samples"),
            p.uinteger("seed"), static_cast<int>(p.integer("max_n")));
        json jcells = json::array();
        std::printf("%8s %8s %14s %12s\n", "u0", "delta", "verdict",
                    "final_mean");
        for (const auto& c : matrix) {
            std::printf("%8g %8g %14s %12g\n", c.u0, c.delta,
                        verdict_name(c.verdict), c.final_mean);
            jcells.push_back({{"u0", c.u0},
                              {"delta", c.delta},
                              {"verdict", verdict_name(c.verdict)},
                              {"final_mean", finite_or_string(c.final_mean)},
                              {"generations", c.generations}});
        }
        record["cells"] = jcells;
    } else {
        throw std::invalid_argument("verify: unknown mode " + mode);
    }
    write_json(record, dir / "verify.json");
    return 0;
}

// shared body for the two decay-rate figures
int figure_u_lambda(Params& p, const fs::path& dir, double alpha,
                    const processes::GroundState& ground,
                    processes::Equation equation,
                    const processes::Transform& transform, long n_default,
                    double ref_scale) {
    const auto grid =
        montecarlo::build_grid(montecarlo::GridPreset::riccati_72);
    processes::ProcessSpec base;
    base.equation = equation;
    base.alpha = alpha;
    base.ground = ground;
    base.u0_or_w0 = 1.0;
    base.generations = static_cast<int>(p.integer("n"));
    base.max_depth = std::max(base.generations, 1);
    base.transform = transform;
    const std::vector<double> lambdas = {0.5, 1.0, 3.0};
    long n_samples = p.integer("samples");
    if (n_samples == 0) n_samples = n_default;
    const auto tables = montecarlo::estimate_u_lambda_family(
        base, lambdas, grid, n_samples, p.uinteger("seed"),
        static_cast<int>(p.integer("workers")));

    std::vector<std::string> files;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::string name = "u_lambda_" + fmtg(lambdas[i]) + ".csv";
        write_table_csv(tables[i], dir / name);
        files.push_back(name);
    }
    const double gamma = series::gamma_exponent(alpha);
    std::ofstream dat(dir / "decay.dat");
    dat << "# t";
    for (double l : lambdas) dat << "  1-u_" << fmtg(l);
    for (double l : lambdas) dat << "  ref_" << fmtg(l);
    dat << "\n";
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        if (!(t > 0.0)) continue;  // log-log plot data
        dat << fmt17(t);
        for (const auto& tab : tables) dat << "  " << fmt17(1.0 - tab.mean[i]);
        for (double l : lambdas)
            dat << "  " << fmt17(ref_scale * l * std::pow(t, -gamma));
        dat << "\n";
    }
    files.push_back("decay.dat");
    json summary = {{"command", "figure"},
                    {"name", p.str("name")},
                    {"alpha", alpha},
                    {"gamma", gamma},
                    {"lambdas", lambdas},
                    {"samples", n_samples},
                    {"generations", base.generations},
                    {"reference_scale", ref_scale},
                    {"files", files}};
    write_json(summary, dir / "summary.json");
    std::cout << "figure " << p.str("name") << ": " << files.size()
              << " files in " << dir.string() << "\n";
    return 0;
}

int cmd_figure(Params p) {
    const std::string name = p.str("name");
    const fs::path dir = ensure_out_dir(p, "figure_" + name);
    write_resolved(p, dir);

    if (name == "alpha3") {
        // additive iterates of the 2-step decay table, exponentiated per
        // lambda; decay references are lambda * t^{-gamma}
        const auto ground = parse_ground("eta:2", 3.0);
        return figure_u_lambda(p, dir, 3.0, ground,
                               processes::Equation::pantograph,
                               processes::Transform::exponential(1.0), 2000,
                               1.0);
    }
    if (name == "alpha14") {
        // cutoff ground 1 - delta t^{-gamma} past m; power transform family;
        // decay references are lambda * delta * t^{-gamma}
        const double m = p.num("m");
        const double delta = p.num("delta");
        const auto ground =
            parse_ground("rho:" + fmtg(m) + ":" + fmtg(delta), 1.4);
        return figure_u_lambda(p, dir, 1.4, ground,
                               processes::Equation::riccati,
                               processes::Transform::power(1.0), 200, delta);
    }
    if (name == "eta") {
        const double a = 2.0, alpha = 3.0;
        const auto grid =
            montecarlo::build_grid(montecarlo::GridPreset::pantograph_71);
        long n_samples = p.integer("samples");
        std::vector<long> budgets;
        if (n_samples > 0) budgets.assign(grid.ranges.size(), n_samples);
        const auto fam = montecarlo::estimate_eta_family(
            alpha, a, grid, budgets, p.uinteger("seed"), 15, 6,
            static_cast<int>(p.integer("workers")));
        const auto eta =
            picard::eta_table(a, alpha, 2, geomspace(0.02, 60.0, 90));
        write_table_csv(fam.eta, dir / "eta_mc.csv");
        write_table_csv(fam.eta_prime, dir / "eta_prime_mc.csv");
        write_table_csv(fam.eta_sum, dir / "eta_sum_mc.csv");
        std::ofstream dat(dir / "eta.dat");
        dat << "# t eta eta_mc eta_mc_se etap etap_mc etap_mc_se "
               "etaint etaint_mc etaint_mc_se\n";
        for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
            const double t = grid.nodes[i];
            const double det = eta(t);
            const double detp = a * eta(alpha * t) - det;
            const double deti =
                t > 0.0 ? quad::integrate([&](double s) { return eta(s); },
                                          0.0, t, 1e-9, eta.nodes())
                        : 0.0;
            dat << fmt17(t) << "  " << fmt17(det) << "  "
                << fmt17(fam.eta.mean[i]) << "  " << fmt17(fam.eta.std_err[i])
                << "  " << fmt17(detp) << "  " << fmt17(fam.eta_prime.mean[i])
                << "  " << fmt17(fam.eta_prime.std_err[i]) << "  "
                << fmt17(deti) << "  " << fmt17(fam.eta_sum.mean[i]) << "  "
                << fmt17(fam.eta_sum.std_err[i]) << "\n";
        }
        json summary = {{"command", "figure"},
                        {"name", name},
                        {"a", a},
                        {"alpha", alpha},
                        {"gamma_a", series::gamma_a(a, alpha)},
                        {"files",
                         {"eta_mc.csv", "eta_prime_mc.csv", "eta_sum_mc.csv",
                          "eta.dat"}}};
        write_json(summary, dir / "summary.json");
        std::cout << "figure eta: 4 files in " << dir.string() << "\n";
        return 0;
    }
    throw std::invalid_argument("figure: unknown name " + name);
}

int cmd_validate(Params p) {
    int rejected = 0;
    bool checked = false;
    auto report = [&](const std::string& what, bool ok,
                      const std::string& why) {
        checked = true;
        if (ok) {
            std::cout << what << ": ok\n";
        } else {
            std::cout << what << ": rejected (" << why << ")\n";
            ++rejected;
        }
    };

    const bool has_a = !p.kv["a"].empty();
    const bool has_alpha = !p.kv["alpha"].empty();
    const bool has_m = !p.kv["m"].empty();
    const bool has_delta = !p.kv["delta"].empty();
    const bool has_u0 = !p.kv["u0"].empty();

    if (has_a && has_alpha) {
        const double a = p.num("a"), alpha = p.num("alpha");
        report("decaying pantograph solution (a=" + fmtg(a) +
                   ", alpha=" + fmtg(alpha) + ")",
               a > 0.0 && alpha > std::max(a, 1.0),
               "needs a > 0 and alpha > max(a, 1)");
    }
    if (has_m && has_delta && has_alpha) {
        const double m = p.num("m"), delta = p.num("delta");
        const double alpha = p.num("alpha");
        if (!(alpha > 1.0) || !(alpha <= 2.0)) {
            report("cutoff ground (m=" + fmtg(m) + ", delta=" + fmtg(delta) +
                       ", alpha=" + fmtg(alpha) + ")",
                   false, "alpha must lie in (1, 2]");
        } else {
            bool ok = false;
            std::string why = "delta exceeds the certified endpoint";
            try {
                ok = processes::delta_is_admissible(m, alpha, delta);
            } catch (const std::exception& e) {
                why = e.what();
            }
            report("cutoff ground (m=" + fmtg(m) + ", delta=" + fmtg(delta) +
                       ", alpha=" + fmtg(alpha) + ")",
                   ok, why);
        }
    }
    if (has_u0 && has_alpha) {
        const double u0 = p.num("u0"), alpha = p.num("alpha");
        if (!(alpha > 1.0)) {
            report("product initial data (u0=" + fmtg(u0) + ")", false,
                   "alpha must exceed 1");
        } else {
            const double endpoint = processes::r_alpha_range(alpha);
            report("product initial data (u0=" + fmtg(u0) +
                       ", alpha=" + fmtg(alpha) + ")",
                   (u0 >= 0.0 && u0 < endpoint) || u0 == 1.0,
                   "u0 outside [0, " + fmtg(endpoint) + ") and not 1");
        }
    }
    if (!checked)
        throw std::invalid_argument(
            "validate: provide (a, alpha), (m, delta, alpha) and/or (u0, alpha)");
    return rejected == 0 ? 0 : 2;
}

// ---------------------------------------------------------------------------
// wiring

struct SubSpec {
    std::string name;
    std::string help;
    std::vector<std::pair<std::string, std::string>> defaults;  // key, value
    std::vector<std::pair<std::string, std::string>> help_text; // key, blurb
    int (*run)(Params);
};

int dispatch(const SubSpec& spec, const std::string& config_path,
             const KV& cli) {
    try {
        KV defaults;
        for (const auto& [k, v] : spec.defaults) defaults[k] = v;
        Params p = resolve(spec.name, defaults, config_path, cli);
        return spec.run(std::move(p));
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascade simulation and verification toolkit"};
    app.require_subcommand(1);

    const std::string seed = default_seed();
    std::vector<SubSpec> specs = {
        {"series",
         "Evaluate closed-form series curves on a uniform time grid",
         {{"curve", "pantograph"}, {"a", "0.5"}, {"alpha", "3"}, {"w0", "1"},
          {"tol", "1e-10"}, {"t_lo", "0"}, {"t_hi", "10"}, {"points", "101"},
          {"out", ""}},
         {{"curve", "pantograph | explosion_ccdf | explosion_pdf"},
          {"a", "delayed-term coefficient"},
          {"alpha", "argument scaling"},
          {"w0", "initial value"},
          {"tol", "series truncation tolerance"},
          {"t_lo", "first node"},
          {"t_hi", "last node"},
          {"points", "node count"},
          {"out", "output directory (default out/series)"}},
         cmd_series},
        {"picard",
         "Build the iterated decay table and report its equation residual",
         {{"a", "2"}, {"alpha", "3"}, {"n_iter", "2"}, {"grid_lo", "0.02"},
          {"grid_hi", "60"}, {"grid_points", "90"}, {"t_patch", "50"},
          {"probe_lo", "0.5"}, {"probe_hi", "12"}, {"probe_points", "25"},
          {"out", ""}},
         {{"a", "branching weight, 1 < a < alpha"},
          {"alpha", "argument scaling"},
          {"n_iter", "fixed-point iterations"},
          {"grid_lo", "first table node"},
          {"grid_hi", "last table node"},
          {"grid_points", "table node count"},
          {"t_patch", "snap nodes past this time onto the asymptote"},
          {"probe_lo", "residual window start"},
          {"probe_hi", "residual window end"},
          {"probe_points", "residual probe count"},
          {"out", "output directory (default out/picard)"}},
         cmd_picard},
        {"simulate",
         "Dump one cascade realization with extreme bounds and "
         "hyperexplosive subtrees",
         {{"alpha", "3"}, {"seed", seed}, {"depth", "20"}, {"t", "2"},
          {"epsilon", "1e-4"}, {"dump_depth", "6"}, {"out", ""}},
         {{"alpha", "clock rescaling base"},
          {"seed", "realization seed"},
          {"depth", "truncation depth"},
          {"t", "horizon for hyperexplosive detection"},
          {"epsilon", "certification confidence budget"},
          {"dump_depth", "generations written to cascade.csv"},
          {"out", "output directory (default out/simulate)"}},
         cmd_simulate},
        {"estimate",
         "Monte Carlo estimate of the decay family or a transformed "
         "iterate family",
         {{"family", "eta"}, {"a", "2"}, {"alpha", "3"}, {"k_trunc", "15"},
          {"k_bar", "6"}, {"budgets", ""}, {"grid", "pantograph_71"},
          {"equation", "riccati"}, {"ground", "constant:1"}, {"u0", "1"},
          {"n", "10"}, {"transform", "power"}, {"lambdas", "0.5,1,3"},
          {"samples", "200"}, {"seed", seed}, {"workers", "1"}, {"out", ""}},
         {{"family", "eta | u_lambda"},
          {"a", "decay weight (eta family)"},
          {"alpha", "argument scaling"},
          {"k_trunc", "explosion-time truncation terms (eta family)"},
          {"k_bar", "integral estimator terms (eta family)"},
          {"budgets", "comma-separated per-range sample counts (eta family)"},
          {"grid", "pantograph_71 | riccati_72 | lo:hi:count,..."},
          {"equation", "riccati | pantograph (u_lambda family)"},
          {"ground", "constant:<c> | rho:<m>:<delta> | mu | ga | eta[:<iters>]"},
          {"u0", "leaf initial value (u_lambda family)"},
          {"n", "iterate generation (u_lambda family)"},
          {"transform", "exponential | power (u_lambda family)"},
          {"lambdas", "comma-separated transform parameters"},
          {"samples", "sample count (u_lambda family)"},
          {"seed", "estimator seed"},
          {"workers", "worker threads (results identical for any count)"},
          {"out", "output directory (default out/estimate)"}},
         cmd_estimate},
        {"verify",
         "Fit rates, tail slopes, decay classes, or the ground-state "
         "verdict matrix",
         {{"mode", "rate"}, {"table", ""}, {"gamma", "0.6309297535714574"},
          {"window_lo", "11"}, {"window_hi", "111"}, {"source", "explosion"},
          {"alpha", "3"}, {"samples", "100000"}, {"k_trunc", "60"},
          {"depth", "30"}, {"complement", "false"}, {"cells", "0,1,0.5,2"},
          {"t_probe", "20"}, {"max_n", "12"}, {"seed", seed}, {"out", ""}},
         {{"mode", "rate | tail | classify | matrix"},
          {"table", "estimate CSV to fit or classify"},
          {"gamma", "algebraic reference exponent"},
          {"window_lo", "fit window start"},
          {"window_hi", "fit window end"},
          {"source", "explosion | hyper (tail mode sample source)"},
          {"alpha", "clock rescaling base"},
          {"samples", "sample count"},
          {"k_trunc", "explosion-time truncation terms (tail mode)"},
          {"depth", "realization depth (tail mode, hyper source)"},
          {"complement", "classify 1 - mean instead of mean (true/false)"},
          {"cells", "u0,delta pairs for matrix mode, e.g. 0,1,0.5,2"},
          {"t_probe", "probe time for matrix mode"},
          {"max_n", "deepest iterate for matrix mode"},
          {"seed", "sampling seed"},
          {"out", "output directory (default out/verify)"}},
         cmd_verify},
        {"figure",
         "Recreate plot data: alpha3 / alpha14 decay families or the eta "
         "comparison",
         {{"name", ""}, {"n", "10"}, {"samples", "0"}, {"m", "10"},
          {"delta", "4"}, {"seed", seed}, {"workers", "1"}, {"out", ""}},
         {{"name", "alpha3 | alpha14 | eta"},
          {"n", "iterate generation"},
          {"samples", "sample count override (0 keeps the preset: 2000 for "
                      "alpha3, 200 for alpha14, per-range 10000/3000/2000 "
                      "for eta)"},
          {"m", "cutoff threshold (alpha14)"},
          {"delta", "cutoff coefficient (alpha14)"},
          {"seed", "estimator seed"},
          {"workers", "worker threads (results identical for any count)"},
          {"out", "output directory (default out/figure_<name>)"}},
         cmd_figure},
        {"validate",
         "Check parameter-region certifications without running anything",
         {{"a", ""}, {"alpha", ""}, {"m", ""}, {"delta", ""}, {"u0", ""}},
         {{"a", "decay weight: checked against alpha > max(a, 1)"},
          {"alpha", "argument scaling"},
          {"m", "cutoff threshold: checked with delta for admissibility"},
          {"delta", "cutoff coefficient"},
          {"u0", "product initial data: checked against the admissible range"}},
         cmd_validate}};

    struct SubState {
        std::string config_path;
        KV cli;
    };
    std::vector<SubState> states(specs.size());
    const SubSpec* chosen = nullptr;
    SubState* chosen_state = nullptr;

    for (std::size_t i = 0; i < specs.size(); ++i) {
        const SubSpec& spec = specs[i];
        SubState& st = states[i];
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("--config", st.config_path,
                        "key = value config file (INI-like text or flat JSON)");
        std::map<std::string, std::string> blurbs(spec.help_text.begin(),
                                                  spec.help_text.end());
        for (const auto& [key, value] : spec.defaults) {
            std::string help = blurbs.count(key) ? blurbs[key] : "";
            if (!value.empty()) help += " [default: " + value + "]";
            const std::string k = key;
            SubState* stp = &st;
            if (spec.name == "figure" && key == "name") {
                sub->add_option(
                       "name",
                       [stp, k](const CLI::results_t& res) {
                           stp->cli[k] = res[0];
                           return true;
                       },
                       help)
                    ->required();
                continue;
            }
            sub->add_option(
                "--" + key,
                [stp, k](const CLI::results_t& res) {
                    stp->cli[k] = res[0];
                    return true;
                },
                help);
        }
        sub->callback([&chosen, &chosen_state, &spec, &st]() {
            chosen = &spec;
            chosen_state = &st;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!chosen) return 2;
    return dispatch(*chosen, chosen_state->config_path, chosen_state->cli);
}

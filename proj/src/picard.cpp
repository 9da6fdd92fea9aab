#include "asa/picard.hpp"

#include <cmath>
#include <stdexcept>

#include "asa/quadrature.hpp"

namespace asa::picard {

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("picard: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0)
            throw std::invalid_argument("picard: grid nodes must be finite and nonnegative");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("picard: grid must be strictly increasing");
    }
}

// Shared core for both right-hand sides. After the substitution u = alpha(t-s),
//   INT_0^t e^{-s} g(alpha (t-s)) ds = (1/alpha) INT_0^{alpha t} e^{(u - alpha t)/alpha} g(u) du,
// whose integrand never exceeds |g| (the exponent is <= 0), so arbitrarily
// large t is safe. A runs along the grid as the integral normalized at the
// current node; each step reuses all earlier panels, damped by e^{-dt}.
std::vector<double> apply_rhs(const std::function<double(double)>& g,
                              const std::vector<double>& kinks,
                              double coeff, double alpha, double init,
                              const std::vector<double>& grid,
                              double abs_tol) {
    check_grid(grid);
    if (!(alpha > 0.0)) throw std::invalid_argument("picard: alpha must be positive");
    const double panel_tol = abs_tol / 64.0;
    std::vector<double> out(grid.size());
    double a_prev = 0.0;  // normalized integral up to alpha * t_prev
    double t_prev = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        if (t == 0.0) {
            out[k] = init;
            continue;
        }
        const double u_lo = alpha * t_prev;
        const double u_hi = alpha * t;
        const double panel = quad::integrate(
            [&](double u) { return std::exp((u - u_hi) / alpha) * g(u); },
            u_lo, u_hi, panel_tol, kinks);
        const double a_cur = a_prev * std::exp(-(t - t_prev)) + panel;
        out[k] = init * std::exp(-t) + (coeff / alpha) * a_cur;
        a_prev = a_cur;
        t_prev = t;
    }
    return out;
}

std::vector<double> merged_kinks(const GridFunction& f) {
    std::vector<double> kinks = f.nodes();
    kinks.push_back(0.0);
    return kinks;
}

}  // namespace

std::vector<double> apply_pantograph_rhs(const Integrand& f,
                                         const std::vector<double>& kinks,
                                         double a, double alpha, double w0,
                                         const std::vector<double>& grid,
                                         double abs_tol) {
    return apply_rhs(f, kinks, a, alpha, w0, grid, abs_tol);
}

std::vector<double> apply_riccati_rhs(const Integrand& f,
                                      const std::vector<double>& kinks,
                                      double alpha, double u0,
                                      const std::vector<double>& grid,
                                      double abs_tol) {
    auto g = [&f](double u) {
        const double v = f(u);
        return v * v;
    };
    return apply_rhs(g, kinks, 1.0, alpha, u0, grid, abs_tol);
}

GridFunction picard_step_pantograph(const GridFunction& f, double a,
                                    double alpha, double w0,
                                    const std::vector<double>& grid) {
    auto values = apply_pantograph_rhs([&f](double u) { return f(u); },
                                       merged_kinks(f), a, alpha, w0, grid);
    return GridFunction(grid, std::move(values), f.left_value(),
                        f.right_asymptote());
}

GridFunction picard_step_riccati(const GridFunction& f, double alpha,
                                 double u0, const std::vector<double>& grid) {
    auto values = apply_riccati_rhs([&f](double u) { return f(u); },
                                    merged_kinks(f), alpha, u0, grid);
    return GridFunction(grid, std::move(values), f.left_value(),
                        f.right_asymptote());
}

GridFunction eta_table(double a, double alpha, int n_iter,
                       const std::vector<double>& grid, double t_patch) {
    if (!(a > 1.0) || !(alpha > a))
        throw std::invalid_argument("eta_table: requires 1 < a < alpha");
    if (n_iter < 0) throw std::invalid_argument("eta_table: n_iter < 0");
    const double gamma = std::log(a) / std::log(alpha);
    std::vector<double> nodes;
    for (double t : grid)
        if (t > 0.0) nodes.push_back(t);
    check_grid(nodes);
    const Asymptote asym{Asymptote::Kind::power, 1.0, gamma, 0.0};

    auto seed_fn = [gamma](double u) {
        return u > 0.0 ? std::pow(u, -gamma) : 0.0;
    };
    auto patch = [&](std::vector<double>& values) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] > t_patch) values[i] = std::pow(nodes[i], -gamma);
    };

    std::vector<double> values;
    if (n_iter == 0) {
        values.resize(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            values[i] = std::pow(nodes[i], -gamma);
        return GridFunction(nodes, std::move(values), 0.0, asym);
    }

    // first step integrates the exact algebraic seed (tabulating it first
    // would lose the singular head near 0)
    values = apply_pantograph_rhs(seed_fn, {0.0}, a, alpha, 0.0, nodes);
    patch(values);
    GridFunction cur(nodes, values, 0.0, asym);
    for (int it = 1; it < n_iter; ++it) {
        values = apply_pantograph_rhs([&cur](double u) { return cur(u); },
                                      merged_kinks(cur), a, alpha, 0.0, nodes);
        patch(values);
        cur = GridFunction(nodes, values, 0.0, asym);
    }
    return cur;
}

double residual_pantograph(const GridFunction& w, double a, double alpha,
                           double w0, const std::vector<double>& grid) {
    const auto rhs = apply_pantograph_rhs([&w](double u) { return w(u); },
                                          merged_kinks(w), a, alpha, w0, grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst, std::fabs(w(grid[k]) - rhs[k]));
    return worst;
}

double residual_riccati(const GridFunction& u, double alpha, double u0,
                        const std::vector<double>& grid) {
    const auto rhs = apply_riccati_rhs([&u](double s) { return u(s); },
                                       merged_kinks(u), alpha, u0, grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst, std::fabs(u(grid[k]) - rhs[k]));
    return worst;
}

}  // namespace asa::picard

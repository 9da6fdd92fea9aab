#pragma once

// Fixed-point machinery for the two delay equations in mild form,
//
//   pantograph:  w(t) = e^{-t} w0 + a   INT_0^t e^{-s} w(alpha (t-s)) ds
//   riccati:     u(t) = e^{-t} u0 +     INT_0^t e^{-s} u(alpha (t-s))^2 ds
//
// One "step" applies the right-hand side to a tabulated (or callable)
// iterate and returns the result tabulated on a caller-supplied grid.
// Repeated stepping from a suitable seed converges to the fixed point on
// compact windows; the residual helpers measure how far a table is from
// solving its equation.

#include <functional>
#include <vector>

#include "asa/grid_function.hpp"

namespace asa::picard {

using Integrand = std::function<double(double)>;

// Apply the right-hand side to an arbitrary callable f, evaluated at each
// grid node (nodes must be nonnegative, strictly increasing). `kinks` lists
// points in f's own argument where f is not smooth; the quadrature splits
// there. abs_tol is the per-node integral tolerance.
std::vector<double> apply_pantograph_rhs(const Integrand& f,
                                         const std::vector<double>& kinks,
                                         double a, double alpha, double w0,
                                         const std::vector<double>& grid,
                                         double abs_tol = 1e-10);
std::vector<double> apply_riccati_rhs(const Integrand& f,
                                      const std::vector<double>& kinks,
                                      double alpha, double u0,
                                      const std::vector<double>& grid,
                                      double abs_tol = 1e-10);

// One step on a tabulated iterate. The result keeps f's left_value and
// right asymptote kind; nodes are the supplied grid.
GridFunction picard_step_pantograph(const GridFunction& f, double a,
                                    double alpha, double w0,
                                    const std::vector<double>& grid);
GridFunction picard_step_riccati(const GridFunction& f, double alpha,
                                 double u0, const std::vector<double>& grid);

// Iterated table for the decreasing-to-zero pantograph solution with
// w(0) = 0 and algebraic decay t^{-gamma_a}. Seed iterate is exactly
// t^{-gamma_a}; after each step, values at nodes past t_patch are snapped
// back to the asymptote so truncation error cannot accumulate at the far
// end. Requires a > 1 and alpha > a (decay exponent in (0, 1)).
GridFunction eta_table(double a, double alpha, int n_iter,
                       const std::vector<double>& grid,
                       double t_patch = 50.0);

// Max over grid nodes of |table(t) - RHS[table](t)|.
double residual_pantograph(const GridFunction& w, double a, double alpha,
                           double w0, const std::vector<double>& grid);
double residual_riccati(const GridFunction& u, double alpha, double u0,
                        const std::vector<double>& grid);

}  // namespace asa::picard

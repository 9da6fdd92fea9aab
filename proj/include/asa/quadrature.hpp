#pragma once

// Thin adaptive-quadrature wrapper. Splits the interval at supplied
// breakpoints (integrand kinks or jump points) and integrates each piece
// with a double-exponential rule, so integrable endpoint singularities
// are handled without special-casing.

#include <functional>
#include <vector>

namespace asa::quad {

// Integrate f over [a, b] to absolute tolerance abs_tol. Breakpoints outside
// (a, b) are ignored. Throws std::runtime_error if the rule fails to reach
// the requested tolerance on some piece.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, const std::vector<double>& breakpoints = {});

}  // namespace asa::quad

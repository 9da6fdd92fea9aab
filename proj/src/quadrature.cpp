#include "asa/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace asa::quad {

namespace {

boost::math::quadrature::tanh_sinh<double>& integrator() {
    // reusing the node tables across calls is the whole point of the
    // thread_local; construction is not cheap
    static thread_local boost::math::quadrature::tanh_sinh<double> q(15);
    return q;
}

double integrate_piece(const std::function<double(double)>& f, double a,
                       double b, double tol) {
    if (!(b > a)) return 0.0;
    double error = 0.0, l1 = 0.0;
    // tanh_sinh takes a relative tolerance; feed it the absolute target
    // scaled by the interval's rough magnitude and check the absolute
    // error estimate ourselves afterwards.
    const double rel = 1e-13;
    const double val = integrator().integrate(f, a, b, rel, &error, &l1);
    if (!std::isfinite(val))
        throw std::runtime_error("quadrature: non-finite integral value");
    if (error > tol && error > 1e-11 * (1.0 + l1))
        throw std::runtime_error("quadrature: tolerance not reached");
    return val;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, const std::vector<double>& breakpoints) {
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw std::invalid_argument("quadrature: non-finite bounds");
    if (b <= a) return 0.0;
    std::vector<double> interior;
    for (double p : breakpoints)
        if (p > a && p < b) interior.push_back(p);
    std::sort(interior.begin(), interior.end());
    // coalesce breakpoints that sit within a sliver of each other or of the
    // endpoints; zero-width pieces make the error estimator report garbage
    const double sliver = 1e-9 * (b - a);
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : interior)
        if (p - pts.back() > sliver && b - p > sliver) pts.push_back(p);
    pts.push_back(b);
    const double piece_tol =
        abs_tol / static_cast<double>(std::max<std::size_t>(pts.size() - 1, 1));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate_piece(f, pts[i], pts[i + 1], piece_tol);
    return total;
}

}  // namespace asa::quad

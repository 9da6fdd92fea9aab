#pragma once

// Piecewise monotone-cubic function tables defined on a positive time grid,
// with declared behavior on (-inf, first node) and past the last node. Every
// real argument evaluates to something sensible: tables never extrapolate
// polynomials, they hold the declared left value / asymptote instead.

#include <iosfwd>
#include <vector>

namespace asa::picard {

struct Asymptote {
    enum class Kind { none, power, constant };
    Kind kind = Kind::none;
    double c = 1.0;      // power: c * t^{-gamma} beyond the last node
    double gamma = 0.0;
    double value = 0.0;  // constant: this value beyond the last node
};

class GridFunction {
public:
    GridFunction() = default;
    // nodes strictly increasing and nonnegative; one value per node
    GridFunction(std::vector<double> nodes, std::vector<double> values,
                 double left_value, Asymptote asym);

    double operator()(double t) const;

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double left_value() const { return left_value_; }
    const Asymptote& right_asymptote() const { return asym_; }
    bool empty() const { return nodes_.empty(); }

    // CSV with a one-line '#' header carrying left_value and the asymptote
    void write_csv(std::ostream& os) const;
    static GridFunction read_csv(std::istream& is);

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> slopes_;  // monotonicity-preserving cubic slopes
    double left_value_ = 0.0;
    Asymptote asym_;
};

}  // namespace asa::picard

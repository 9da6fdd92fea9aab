#include "asa/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace asa::picard {

namespace {

// Monotonicity-preserving cubic slopes (Fritsch-Carlson). Keeps the
// interpolant free of overshoot between nodes, which matters because these
// tables feed integrands that must stay nonnegative.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n == 1) return m;
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        d[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        m[0] = m[1] = d[0];
        return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if ((d0 > 0) != (d1 > 0) && std::fabs(s) > 3.0 * std::fabs(d0))
            return 3.0 * d0;
        return s;
    };
    m[0] = endpoint(h[0], h[1], d[0], d[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return m;
}

}  // namespace

GridFunction::GridFunction(std::vector<double> nodes,
                           std::vector<double> values, double left_value,
                           Asymptote asym)
    : nodes_(std::move(nodes)),
      values_(std::move(values)),
      left_value_(left_value),
      asym_(asym) {
    if (nodes_.size() != values_.size())
        throw std::invalid_argument("grid_function: nodes/values size mismatch");
    if (nodes_.empty())
        throw std::invalid_argument("grid_function: empty table");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i]) || nodes_[i] < 0.0)
            throw std::invalid_argument("grid_function: nodes must be finite and nonnegative");
        if (i > 0 && nodes_[i] <= nodes_[i - 1])
            throw std::invalid_argument("grid_function: nodes must be strictly increasing");
    }
    slopes_ = pchip_slopes(nodes_, values_);
}

double GridFunction::operator()(double t) const {
    if (nodes_.empty()) throw std::logic_error("grid_function: evaluating empty table");
    if (t < nodes_.front()) return left_value_;
    if (t > nodes_.back()) {
        switch (asym_.kind) {
            case Asymptote::Kind::power:
                return asym_.c * std::pow(t, -asym_.gamma);
            case Asymptote::Kind::constant:
                return asym_.value;
            case Asymptote::Kind::none:
                return values_.back();
        }
    }
    // locate the cell [x_i, x_{i+1}] containing t
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return values_.front();  // t == first node
    if (i >= nodes_.size()) i = nodes_.size() - 1;
    --i;
    const double h = nodes_[i + 1] - nodes_[i];
    const double s = (t - nodes_[i]) / h;
    const double s2 = s * s;
    const double oms = 1.0 - s;
    const double h00 = (1.0 + 2.0 * s) * oms * oms;
    const double h10 = s * oms * oms;
    const double h01 = s2 * (3.0 - 2.0 * s);
    const double h11 = s2 * (s - 1.0);
    return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] +
           h11 * h * slopes_[i + 1];
}

void GridFunction::write_csv(std::ostream& os) const {
    char buf[512];
    const char* kind = asym_.kind == Asymptote::Kind::power      ? "power"
                       : asym_.kind == Asymptote::Kind::constant ? "constant"
                                                                 : "none";
    std::snprintf(buf, sizeof buf,
                  "# grid_function left=%.17g asymptote=%s c=%.17g gamma=%.17g value=%.17g\n",
                  left_value_, kind, asym_.c, asym_.gamma, asym_.value);
    os << buf << "node,value\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", nodes_[i], values_[i]);
        os << buf;
    }
}

GridFunction GridFunction::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# grid_function", 0) != 0)
        throw std::runtime_error("grid_function: bad csv header");
    double left = 0.0;
    Asymptote asym;
    {
        std::istringstream hs(line.substr(std::string("# grid_function").size()));
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "left") left = std::stod(val);
            else if (key == "c") asym.c = std::stod(val);
            else if (key == "gamma") asym.gamma = std::stod(val);
            else if (key == "value") asym.value = std::stod(val);
            else if (key == "asymptote") {
                if (val == "power") asym.kind = Asymptote::Kind::power;
                else if (val == "constant") asym.kind = Asymptote::Kind::constant;
                else asym.kind = Asymptote::Kind::none;
            }
        }
    }
    if (!std::getline(is, line) || line != "node,value")
        throw std::runtime_error("grid_function: bad csv column line");
    std::vector<double> nodes, values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("grid_function: bad csv row");
        nodes.push_back(std::stod(line.substr(0, comma)));
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return GridFunction(std::move(nodes), std::move(values), left, asym);
}

}  // namespace asa::picard

#include "rcurve/gridfn.hpp"

#include <algorithm>
#include <cmath>

namespace rcurve {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Integral over [alpha, beta] of the quadratic Lagrange interpolant through
// (xa,fa), (xb,fb), (xc,fc), applied componentwise.
Eigen::VectorXd quad_interp_integral(double xa, double xb, double xc,
                                     const Eigen::VectorXd& fa,
                                     const Eigen::VectorXd& fb,
                                     const Eigen::VectorXd& fc,
                                     double alpha, double beta) {
    auto mom = [&](double p, double q) {
        // integral of (x-p)(x-q) over [alpha, beta]
        double c3 = (beta * beta * beta - alpha * alpha * alpha) / 3.0;
        double c2 = (beta * beta - alpha * alpha) / 2.0;
        double c1 = beta - alpha;
        return c3 - (p + q) * c2 + p * q * c1;
    };
    double wa = mom(xb, xc) / ((xa - xb) * (xa - xc));
    double wb = mom(xa, xc) / ((xb - xa) * (xb - xc));
    double wc = mom(xa, xb) / ((xc - xa) * (xc - xb));
    return wa * fa + wb * fb + wc * fc;
}

} // namespace

GridFunction::GridFunction(std::vector<double> grid, std::vector<Eigen::VectorXd> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2)
        throw validation_error("GridFunction: need at least two grid points");
    if (grid_.size() != values_.size())
        throw validation_error("GridFunction: grid/values size mismatch");
    const Eigen::Index d = values_.front().size();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i]))
            throw validation_error("GridFunction: non-finite grid point");
        if (i > 0 && grid_[i] <= grid_[i - 1])
            throw validation_error("GridFunction: grid not strictly increasing");
        if (values_[i].size() != d)
            throw validation_error("GridFunction: inconsistent value dimension");
    }
}

std::size_t GridFunction::locate(double x) const {
    if (x < grid_.front() || x > grid_.back())
        throw std::out_of_range("GridFunction: x outside grid span");
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    if (k == 0) return 0;
    if (k >= grid_.size()) return grid_.size() - 2;
    return k - 1;
}

Eigen::VectorXd GridFunction::at(double x) const {
    std::size_t k = locate(x);
    double x0 = grid_[k], x1 = grid_[k + 1];
    double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * values_[k] + w * values_[k + 1];
}

double GridFunction::at(double x, Eigen::Index c) const {
    std::size_t k = locate(x);
    double x0 = grid_[k], x1 = grid_[k + 1];
    double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * values_[k](c) + w * values_[k + 1](c);
}

namespace {

// Contribution of cell k restricted to [alpha, beta].
Eigen::VectorXd cell_integral(const std::vector<double>& g,
                              const std::vector<Eigen::VectorXd>& v,
                              std::size_t k, double alpha, double beta) {
    const std::size_t last = g.size() - 1;
    if (g.size() == 2) { // single cell: linear interpolant (trapezoid)
        double x0 = g[0], x1 = g[1];
        auto lin = [&](double x) -> Eigen::VectorXd {
            double w = (x - x0) / (x1 - x0);
            return (1.0 - w) * v[0] + w * v[1];
        };
        return 0.5 * (beta - alpha) * (lin(alpha) + lin(beta));
    }
    const bool has_left = k >= 1;
    const bool has_right = k + 2 <= last;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.front().size());
    int cnt = 0;
    if (has_left) {
        acc += quad_interp_integral(g[k - 1], g[k], g[k + 1], v[k - 1], v[k], v[k + 1], alpha, beta);
        ++cnt;
    }
    if (has_right) {
        acc += quad_interp_integral(g[k], g[k + 1], g[k + 2], v[k], v[k + 1], v[k + 2], alpha, beta);
        ++cnt;
    }
    return acc / cnt;
}

} // namespace

Eigen::VectorXd quadrature(const GridFunction& f, double a, double b) {
    const auto& g = f.grid();
    const auto& v = f.values();
    const double span_tol = 1e-12 * (1.0 + std::abs(g.back() - g.front()));
    if (a > b) throw std::out_of_range("quadrature: a > b");
    if (a < g.front() - span_tol || b > g.back() + span_tol)
        throw std::out_of_range("quadrature: [a,b] outside grid span");
    a = std::clamp(a, g.front(), g.back());
    b = std::clamp(b, g.front(), g.back());

    Eigen::VectorXd total = Eigen::VectorXd::Zero(f.dim());
    std::size_t k = f.locate(a);
    while (g[k] < b && k + 1 < g.size()) {
        double lo = std::max(a, g[k]);
        double hi = std::min(b, g[k + 1]);
        if (hi > lo) total += cell_integral(g, v, k, lo, hi);
        ++k;
    }
    return total;
}

double quadrature_scalar(const GridFunction& f, double a, double b) {
    if (f.dim() != 1)
        throw validation_error("quadrature_scalar: function is not scalar-valued");
    return quadrature(f, a, b)(0);
}

GridFunction cumulative_integral(const GridFunction& f) {
    const auto& g = f.grid();
    const auto& v = f.values();
    std::vector<Eigen::VectorXd> prefix(g.size());
    prefix[0] = Eigen::VectorXd::Zero(f.dim());
    for (std::size_t k = 0; k + 1 < g.size(); ++k)
        prefix[k + 1] = prefix[k] + cell_integral(g, v, k, g[k], g[k + 1]);
    return GridFunction(g, std::move(prefix));
}

IntegralTable::IntegralTable(GridFunction f)
    : f_(std::move(f)), prefix_(cumulative_integral(f_)) {}

Eigen::VectorXd IntegralTable::integral_to(double x) const {
    std::size_t k = f_.locate(x);
    const auto& g = f_.grid();
    Eigen::VectorXd out = prefix_.values()[k];
    if (x > g[k]) out += cell_integral(g, f_.values(), k, g[k], x);
    return out;
}

} // namespace rcurve

#ifndef RCURVE_GRIDFN_HPP
#define RCURVE_GRIDFN_HPP

#include <Eigen/Dense>
#include <vector>

#include "rcurve/errors.hpp"

namespace rcurve {

/// Vector-valued function sampled on a strictly increasing grid.
/// Linear interpolation between nodes; all curve solutions store their
/// trajectories in this form.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<double> grid, std::vector<Eigen::VectorXd> values);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Eigen::VectorXd>& values() const { return values_; }
    std::vector<Eigen::VectorXd>& values() { return values_; }

    std::size_t size() const { return grid_.size(); }
    Eigen::Index dim() const { return values_.empty() ? 0 : values_.front().size(); }

    double x_min() const { return grid_.front(); }
    double x_max() const { return grid_.back(); }

    /// Index of the cell [x_k, x_{k+1}] containing x (clamped to the last cell at x_max).
    std::size_t locate(double x) const;

    /// Linear interpolation at x; throws std::out_of_range outside the span.
    Eigen::VectorXd at(double x) const;

    /// Component c interpolated at x.
    double at(double x, Eigen::Index c) const;

private:
    std::vector<double> grid_;
    std::vector<Eigen::VectorXd> values_;
};

/// Integral of f over [a,b]. Each grid cell contributes the exact integral of
/// the quadratic interpolant through the three nearest nodes (interior cells
/// average the left- and right-sided quadratics, which cancels the leading
/// error term); partial end cells integrate the same local quadratic over the
/// sub-range. Exact for polynomials of degree <= 2.
Eigen::VectorXd quadrature(const GridFunction& f, double a, double b);

/// Scalar convenience for dim-1 functions.
double quadrature_scalar(const GridFunction& f, double a, double b);

/// Prefix integrals: result(x_k) = quadrature(f, x_0, x_k) componentwise,
/// accumulated cell by cell so prefix differences match quadrature() exactly.
GridFunction cumulative_integral(const GridFunction& f);

/// Precomputed prefix integrals of a GridFunction, evaluable at arbitrary x
/// in O(1). integral_to(x) reproduces quadrature(f, x_0, x) bit for bit.
class IntegralTable {
public:
    explicit IntegralTable(GridFunction f);

    Eigen::VectorXd integral_to(double x) const;
    Eigen::VectorXd integral(double a, double b) const { return integral_to(b) - integral_to(a); }
    const GridFunction& function() const { return f_; }

private:
    GridFunction f_;
    GridFunction prefix_;
};

} // namespace rcurve

#endif

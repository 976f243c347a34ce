#ifndef RCURVE_LINALG_HPP
#define RCURVE_LINALG_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rcurve/gridfn.hpp"

namespace rcurve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential e^M (scaling-and-squaring with Pade approximant).
/// Throws validation_error for non-square or non-finite input.
Matrix expm(const Matrix& m);

using OdeRhs = std::function<Vector(double, const Vector&)>;

/// Classical fixed-step RK4, one step per grid interval, sampled at every
/// grid node. Throws numerical_error with the offending x if the trajectory
/// or any stage goes non-finite.
GridFunction rk4_solve(const OdeRhs& rhs, const Vector& y0, const std::vector<double>& grid);

/// Basis of the space of quadratic polynomials vanishing (to tolerance) on a
/// point set in R^d. Coefficients are ordered by the monomial basis
///   [1, X_1, ..., X_d, X_1^2, X_1 X_2, ..., X_1 X_d, X_2^2, ..., X_d^2]
/// (constant, linears, then upper-triangular quadratics row by row).
struct QuadraticBasis {
    Eigen::Index d = 0;
    std::vector<Vector> basis; // orthonormal coefficient vectors
    std::size_t dimension() const { return basis.size(); }
};

QuadraticBasis vanishing_quadratics(const std::vector<Vector>& points, double tol = 1e-8);

/// Number of monomials of degree <= 2 in d variables.
Eigen::Index quadratic_monomial_count(Eigen::Index d);

/// Monomial feature vector of y in the order documented above.
Vector quadratic_monomials(const Vector& y);

/// Evaluate a quadratic polynomial given by its coefficient vector at y.
double eval_quadratic(const Vector& coeffs, const Vector& y);

} // namespace rcurve

#endif

#include "rcurve/linalg.hpp"

#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

namespace rcurve {

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols())
        throw validation_error("expm: matrix must be square");
    if (!m.allFinite())
        throw validation_error("expm: matrix has non-finite entries");
    return m.exp();
}

GridFunction rk4_solve(const OdeRhs& rhs, const Vector& y0, const std::vector<double>& grid) {
    if (grid.size() < 2)
        throw validation_error("rk4_solve: grid needs at least two points");
    std::vector<Eigen::VectorXd> traj(grid.size());
    traj[0] = y0;

    auto check = [](const Vector& v, double x) {
        if (!v.allFinite()) {
            std::ostringstream os;
            os << "rk4_solve: non-finite value near x = " << x << " (integration blowup)";
            throw numerical_error(os.str());
        }
    };
    check(y0, grid.front());

    Vector y = y0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double x = grid[i];
        const double h = grid[i + 1] - x;
        Vector k1 = rhs(x, y);
        check(k1, x);
        Vector k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
        check(k2, x);
        Vector k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
        check(k3, x);
        Vector k4 = rhs(x + h, y + h * k3);
        check(k4, x);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check(y, grid[i + 1]);
        traj[i + 1] = y;
    }
    return GridFunction(grid, std::move(traj));
}

Eigen::Index quadratic_monomial_count(Eigen::Index d) {
    return 1 + d + d * (d + 1) / 2;
}

Vector quadratic_monomials(const Vector& y) {
    const Eigen::Index d = y.size();
    Vector m(quadratic_monomial_count(d));
    m(0) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) m(1 + i) = y(i);
    Eigen::Index k = 1 + d;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) m(k++) = y(i) * y(j);
    return m;
}

double eval_quadratic(const Vector& coeffs, const Vector& y) {
    return coeffs.dot(quadratic_monomials(y));
}

QuadraticBasis vanishing_quadratics(const std::vector<Vector>& points, double tol) {
    if (points.size() < 2)
        throw validation_error("vanishing_quadratics: need at least 2 points");
    const Eigen::Index d = points.front().size();
    const Eigen::Index cols = quadratic_monomial_count(d);

    Matrix design(static_cast<Eigen::Index>(points.size()), cols);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vector& p = points[i];
        if (p.size() != d)
            throw validation_error("vanishing_quadratics: inconsistent point dimension");
        if (!p.allFinite())
            throw validation_error("vanishing_quadratics: non-finite point");
        design.row(static_cast<Eigen::Index>(i)) = quadratic_monomials(p).transpose();
    }

    Eigen::JacobiSVD<Matrix> svd(design, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * sv(0);

    QuadraticBasis out;
    out.d = d;
    for (Eigen::Index k = 0; k < cols; ++k)
        if (k >= sv.size() || sv(k) <= cutoff)
            out.basis.push_back(svd.matrixV().col(k));
    return out;
}

} // namespace rcurve

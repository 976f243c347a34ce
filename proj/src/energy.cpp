#include "rcurve/energy.hpp"

#include <cmath>

namespace rcurve {

void EnergyCurveParams::validate() const {
    if (n < 1 || d < 1)
        throw validation_error("energy params: n and d must be >= 1");
    if (!(r > 0.0))
        throw validation_error("energy params: discount rate r must be > 0");
    if (!Q.has_value() || Q->size() != n)
        throw validation_error("energy params: generator missing or wrong size");
    if (static_cast<int>(beta.size()) != d + 1)
        throw validation_error("energy params: need d+1 beta blocks");
    for (const auto& b : beta)
        if (b.rows() != d || b.cols() != n || !b.allFinite())
            throw validation_error("energy params: beta block must be finite d x n");
    if (u0.rows() != d || u0.cols() != n || !u0.allFinite())
        throw validation_error("energy params: u0 must be finite d x n");
    if (u0.size() == 0 || c0.size() != n || !c0.allFinite())
        throw validation_error("energy params: c0 must be finite length n");
}

Matrix apply_L(const Matrix& u_state, const EnergyCurveParams& params) {
    if (u_state.rows() != params.d || u_state.cols() != params.n)
        throw validation_error("apply_L: u state must be d x n");
    const Matrix& q = params.generator().q();
    Matrix out(params.d, params.n);
    for (int j = 0; j < params.n; ++j) {
        Vector col = Vector::Zero(params.d);
        for (int i = 1; i <= params.d; ++i)
            col(i - 1) = params.beta[static_cast<std::size_t>(i)].col(j).dot(u_state.col(j));
        col -= params.r * u_state.col(j);
        for (int k = 0; k < params.n; ++k)
            col += q(j, k) * u_state.col(k);
        out.col(j) = col;
    }
    return out;
}

Vector apply_M(const Vector& c_state, const EnergyCurveParams& params) {
    if (c_state.size() != params.n)
        throw validation_error("apply_M: c state must have length n");
    return params.generator().q() * c_state - params.r * c_state;
}

Vector beta0_forcing(const Matrix& u_state, const EnergyCurveParams& params) {
    Vector f(params.n);
    for (int j = 0; j < params.n; ++j)
        f(j) = params.beta[0].col(j).dot(u_state.col(j));
    return f;
}

namespace {

Vector pack(const Matrix& u, const Vector& c) {
    Vector y(u.size() + c.size());
    y.head(u.size()) = Eigen::Map<const Vector>(u.data(), u.size());
    y.tail(c.size()) = c;
    return y;
}

} // namespace

EnergyCurveGrid solve_energy_curves(const EnergyCurveParams& params, const std::vector<double>& grid) {
    params.validate();
    if (grid.empty() || grid.front() != 0.0)
        throw validation_error("solve_energy_curves: grid must start at 0");

    const int d = params.d, n = params.n;
    OdeRhs rhs = [&params, d, n](double, const Vector& y) -> Vector {
        Matrix u = Eigen::Map<const Matrix>(y.data(), d, n);
        Vector c = y.tail(n);
        return pack(apply_L(u, params), apply_M(c, params) + beta0_forcing(u, params));
    };

    GridFunction sol = rk4_solve(rhs, pack(params.u0, params.c0), grid);

    EnergyCurveGrid out;
    out.grid = grid;
    out.u.reserve(grid.size());
    out.c.reserve(grid.size());
    for (const auto& y : sol.values()) {
        out.u.push_back(Eigen::Map<const Matrix>(y.data(), d, n));
        out.c.push_back(y.tail(n));
    }
    return out;
}

GridFunction EnergyCurveGrid::u_gridfn() const {
    std::vector<Vector> vals;
    vals.reserve(u.size());
    for (const auto& m : u)
        vals.push_back(Eigen::Map<const Vector>(m.data(), m.size()));
    return GridFunction(grid, std::move(vals));
}

GridFunction EnergyCurveGrid::c_gridfn() const {
    return GridFunction(grid, c);
}

namespace {

Matrix d1_generator_shifted(const EnergyCurveParams& params, int which_beta) {
    if (params.d != 1)
        throw validation_error("closed-form energy curves require d = 1");
    params.validate();
    Matrix B = params.beta[static_cast<std::size_t>(which_beta)].row(0).asDiagonal();
    return B - params.r * Matrix::Identity(params.n, params.n) + params.generator().q();
}

} // namespace

Vector closed_form_energy_u(const EnergyCurveParams& params, double x) {
    Matrix m = d1_generator_shifted(params, 1);
    return expm(x * m) * params.u0.row(0).transpose();
}

Vector closed_form_energy_c(const EnergyCurveParams& params, double x) {
    Matrix m = d1_generator_shifted(params, 1);
    Vector b1 = params.beta[1].row(0).transpose();
    for (int j = 0; j < params.n; ++j)
        if (b1(j) == 0.0)
            throw validation_error("closed_form_energy_c: zero linear drift coefficient");
    Matrix B0 = params.beta[0].row(0).asDiagonal();
    Matrix B1inv = b1.cwiseInverse().asDiagonal();
    return B0 * B1inv * expm(x * m) * params.c0;
}

} // namespace rcurve

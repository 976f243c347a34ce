#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcurve/errors.hpp"
#include "rcurve/market.hpp"

using namespace rcurve;

namespace {

std::vector<double> uniform_grid(double b, double step) {
    const auto m = static_cast<std::size_t>(std::llround(b / step));
    std::vector<double> g(m + 1);
    for (std::size_t i = 0; i <= m; ++i) g[i] = static_cast<double>(i) * step;
    g[m] = b;
    return g;
}

// constant-curve energy model: u == u0 per regime, c == c0 (all dynamics off)
ForwardCurveModel constant_energy(const Matrix& u0, const Vector& c0, double r = 0.1) {
    EnergyCurveParams p;
    p.d = static_cast<int>(u0.rows());
    p.n = static_cast<int>(u0.cols());
    p.r = r;
    p.Q = validate_generator(Matrix::Zero(p.n, p.n));
    p.beta.assign(static_cast<std::size_t>(p.d) + 1, Matrix::Zero(p.d, p.n));
    p.u0 = u0;
    p.c0 = c0;
    EnergyCurveGrid g;
    g.grid = uniform_grid(10.0, 0.01);
    g.u.assign(g.grid.size(), u0);
    g.c.assign(g.grid.size(), c0);
    return ForwardCurveModel::from_energy(p, g);
}

// energy model whose level curve is c(x) = x (u == 0)
ForwardCurveModel linear_energy() {
    EnergyCurveParams p;
    p.d = 1;
    p.n = 1;
    p.r = 0.1;
    p.Q = validate_generator(Matrix::Zero(1, 1));
    p.beta.assign(2, Matrix::Zero(1, 1));
    p.u0 = Matrix::Zero(1, 1);
    p.c0 = Vector::Zero(1);
    EnergyCurveGrid g;
    g.grid = uniform_grid(10.0, 0.01);
    for (double x : g.grid) {
        g.u.push_back(Matrix::Zero(1, 1));
        g.c.push_back(Vector::Constant(1, x));
    }
    return ForwardCurveModel::from_energy(p, g);
}

RateCurveParams scalar_rate_params(double u0, double beta1) {
    RateCurveParams p;
    p.n = 1;
    p.d = 1;
    p.Q = validate_generator(Matrix::Zero(1, 1));
    p.u0 = Vector::Constant(1, u0);
    p.c0 = Vector::Constant(1, 0.03);
    p.beta_lin = Matrix::Constant(1, 1, beta1);
    p.A_lin = {Matrix::Zero(1, 1)};
    p.beta0 = Matrix::Zero(1, 1);
    p.A0 = {Matrix::Zero(1, 1)};
    return p;
}

RateCurveParams two_regime_rate_params() {
    RateCurveParams p;
    p.n = 2;
    p.d = 2;
    Matrix q(2, 2);
    q << -1, 1, 2, -2;
    p.Q = validate_generator(q);
    p.u0 = Vector(2);
    p.u0 << 0.9, 0.6;
    p.c0 = Vector(2);
    p.c0 << 1.0, 1.5;
    const double k1 = 0.9, k2 = 0.5;
    // columns are the factor loadings: beta_1 = (-k1, 0), beta_2 = (k1, -k2)
    p.beta_lin = Matrix(2, 2);
    p.beta_lin << -k1, k1, 0.0, -k2;
    Matrix A1 = Matrix::Zero(2, 2), A2 = Matrix::Zero(2, 2);
    A1(0, 0) = 0.04;
    A2(1, 1) = 0.0225;
    p.A_lin = {A1, A2};
    p.beta0 = Matrix(2, 2);
    p.beta0 << 0.0, 0.0, 0.3, 0.05;
    p.A0 = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    return p;
}

} // namespace

TEST_CASE("forward rate is the affine read-out of the curves") {
    Matrix u0(2, 1);
    u0 << 1.0, 2.0;
    const auto model = constant_energy(u0, Vector::Constant(1, 0.5));
    Vector y(2);
    y << 0.3, -0.1;
    CHECK(model.forward_rate(1.0, Vector::Zero(2), 0) == doctest::Approx(0.5));
    CHECK(model.forward_rate(1.0, y, 0) == doctest::Approx(0.5 + 0.3 - 0.2));
    // affine in y: zero second difference
    const double f0 = model.forward_rate(2.0, Vector::Zero(2), 0);
    const double f1 = model.forward_rate(2.0, y, 0);
    const double f2 = model.forward_rate(2.0, Vector(2.0 * y), 0);
    CHECK(std::abs((f2 - f1) - (f1 - f0)) < 1e-14);
    CHECK_THROWS_AS(model.forward_rate(11.0, y, 0), validation_error);
}

TEST_CASE("hjm coefficient read-out") {
    Matrix u0(2, 1);
    u0 << 1.0, 2.0;
    const auto model = constant_energy(u0, Vector::Constant(1, 0.5));
    Vector b(2);
    b << 0.09, 0.2;
    const auto [beta, Sigma] = model.hjm_coefficients(1.0, 0, Matrix::Identity(2, 2), b);
    CHECK(beta == doctest::Approx(0.49).epsilon(1e-14));
    CHECK((Sigma - u0.col(0)).norm() < 1e-14);
    const auto [beta0, s0] = model.hjm_coefficients(1.0, 0, Matrix::Identity(2, 2), Vector::Zero(2));
    CHECK(beta0 == 0.0);
    CHECK(s0.size() == 2);
}

TEST_CASE("bond prices") {
    const auto grid = uniform_grid(10.0, 1e-3);
    // flat short curve: u == 0, c == rho
    auto p = scalar_rate_params(0.0, 0.0);
    const auto sol = solve_rate_curves(p, grid);
    const auto flat = ForwardCurveModel::from_rates(p, sol);
    CHECK(flat.bond_price(0.0, Vector::Zero(1), 0) == doctest::Approx(1.0));
    CHECK(flat.bond_price(4.0, Vector::Zero(1), 0) == doctest::Approx(std::exp(-0.12)).epsilon(1e-10));

    // exponential loading curve: the quadrature matches the antiderivative
    auto pe = scalar_rate_params(0.7, 0.4);
    const auto me = ForwardCurveModel::from_rates(pe, solve_rate_curves(pe, grid));
    Vector y = Vector::Constant(1, 0.8);
    for (double tau : {1.0, 3.0, 7.5}) {
        // compare yields: deep-discount prices underflow any relative bound
        const double iu = 0.7 * (std::exp(0.4 * tau) - 1.0) / 0.4;
        const double log_ref = -(0.03 * tau + y(0) * iu);
        CHECK(std::abs(std::log(me.bond_price(tau, y, 0)) - log_ref) < 1e-8 * (1.0 + std::abs(log_ref)));
    }

    // strictly positive curve means strictly decreasing bond prices
    double prev = 1.0;
    for (double tau : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double b = me.bond_price(tau, y, 0);
        CHECK(b < prev);
        prev = b;
    }
    // futures are not defined on a rates model
    CHECK_THROWS_AS(me.futures_price(0.0, 1.0, y, 0), validation_error);
}

TEST_CASE("futures prices") {
    Matrix u0(1, 1);
    u0 << 0.0;
    const auto flat = constant_energy(u0, Vector::Constant(1, 0.7));
    CHECK(flat.futures_price(1.0, 2.0, Vector::Zero(1), 0) == doctest::Approx(0.7));

    const auto lin = linear_energy();
    CHECK(lin.futures_price(1.0, 3.0, Vector::Zero(1), 0) == doctest::Approx(2.0).epsilon(1e-12));

    // short interval collapses to the forward rate
    const double eps = 0.01;
    const double f = lin.forward_rate(1.0, Vector::Zero(1), 0);
    CHECK(std::abs(lin.futures_price(1.0, 1.0 + eps, Vector::Zero(1), 0) - f) <= 1.0 * eps);

    // length-weighted mid-split identity
    const double whole = lin.futures_price(1.0, 4.0, Vector::Zero(1), 0);
    const double left = lin.futures_price(1.0, 2.5, Vector::Zero(1), 0);
    const double right = lin.futures_price(2.5, 4.0, Vector::Zero(1), 0);
    CHECK(std::abs(whole - (1.5 * left + 1.5 * right) / 3.0) < 1e-12);

    CHECK_THROWS_AS(lin.futures_price(2.0, 2.0, Vector::Zero(1), 0), validation_error);
}

TEST_CASE("short rate") {
    const auto grid = uniform_grid(10.0, 1e-3);
    auto p = two_regime_rate_params();
    const auto model = ForwardCurveModel::from_rates(p, solve_rate_curves(p, grid));
    CHECK(model.short_rate(Vector::Zero(2), 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.short_rate(Vector::Zero(2), 1) == doctest::Approx(1.5).epsilon(1e-12));
    Vector y0(2);
    y0 << 0.1, 0.2;
    CHECK(model.short_rate(y0, 0) == doctest::Approx(1.21).epsilon(1e-12));
}

TEST_CASE("curve integral splits consistently") {
    const auto lin = linear_energy();
    const auto [c1, u1] = lin.curve_integral(0.0, 2.0, 0);
    const auto [c2, u2] = lin.curve_integral(2.0, 5.0, 0);
    const auto [cw, uw] = lin.curve_integral(0.0, 5.0, 0);
    CHECK(std::abs(c1 + c2 - cw) < 1e-12);
    CHECK(std::abs(cw - 12.5) < 1e-10);
}

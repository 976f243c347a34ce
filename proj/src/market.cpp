#include "rcurve/market.hpp"

#include <cmath>
#include <string>

#include "rcurve/errors.hpp"

namespace rcurve {

namespace {

GridFunction stack_regime(const std::vector<double>& grid, int d,
                          const std::function<double(std::size_t)>& c_at,
                          const std::function<Vector(std::size_t)>& u_at) {
    std::vector<Vector> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Vector row(d + 1);
        row(0) = c_at(i);
        row.tail(d) = u_at(i);
        values[i] = std::move(row);
    }
    return GridFunction(grid, std::move(values));
}

} // namespace

ForwardCurveModel ForwardCurveModel::from_energy(EnergyCurveParams params,
                                                 const EnergyCurveGrid& curves) {
    params.validate();
    if (curves.grid.empty()) throw validation_error("empty curve grid");
    ForwardCurveModel m;
    m.kind_ = MarketKind::energy;
    m.n_ = params.n;
    m.d_ = params.d;
    m.r_ = params.r;
    m.span_ = curves.grid.back();
    for (int z = 0; z < params.n; ++z) {
        m.stacked_.push_back(stack_regime(
            curves.grid, params.d, [&](std::size_t i) { return curves.c[i](z); },
            [&](std::size_t i) -> Vector { return curves.u[i].col(z); }));
        m.tables_.emplace_back(m.stacked_.back());
    }
    m.params_ = std::move(params);
    m.curves_ = curves;
    return m;
}

ForwardCurveModel ForwardCurveModel::from_rates(RateCurveParams params,
                                                const RateCurveGrid& curves) {
    params.validate();
    if (curves.grid.empty()) throw validation_error("empty curve grid");
    ForwardCurveModel m;
    m.kind_ = MarketKind::rates;
    m.n_ = params.n;
    m.d_ = params.d;
    m.span_ = curves.grid.back();
    for (int z = 0; z < params.n; ++z) {
        m.stacked_.push_back(stack_regime(
            curves.grid, params.d, [&](std::size_t i) { return curves.c.values()[i](z); },
            [&](std::size_t i) -> Vector { return curves.u.values()[i]; }));
        m.tables_.emplace_back(m.stacked_.back());
    }
    m.params_ = std::move(params);
    m.curves_ = curves;
    return m;
}

const EnergyCurveParams& ForwardCurveModel::energy_params() const {
    if (kind_ != MarketKind::energy) throw validation_error("not an energy model");
    return std::get<EnergyCurveParams>(params_);
}

const RateCurveParams& ForwardCurveModel::rate_params() const {
    if (kind_ != MarketKind::rates) throw validation_error("not a rates model");
    return std::get<RateCurveParams>(params_);
}

const EnergyCurveGrid& ForwardCurveModel::energy_curves() const {
    if (kind_ != MarketKind::energy) throw validation_error("not an energy model");
    return std::get<EnergyCurveGrid>(curves_);
}

const RateCurveGrid& ForwardCurveModel::rate_curves() const {
    if (kind_ != MarketKind::rates) throw validation_error("not a rates model");
    return std::get<RateCurveGrid>(curves_);
}

void ForwardCurveModel::check_state(double x, const Vector& y, int z) const {
    if (!(x >= 0.0) || x > span_ * (1.0 + 1e-12)) {
        throw validation_error("maturity x = " + std::to_string(x) + " outside curve span [0, " +
                               std::to_string(span_) + "]");
    }
    if (y.size() != d_) throw validation_error("state vector has wrong dimension");
    if (z < 0 || z >= n_) throw validation_error("regime index out of range");
}

std::pair<double, Vector> ForwardCurveModel::curve_at(double x, int z) const {
    const Vector row = stacked_[static_cast<std::size_t>(z)].at(x);
    return {row(0), row.tail(d_)};
}

std::pair<double, Vector> ForwardCurveModel::curve_integral(double a, double b, int z) const {
    const Vector row = tables_[static_cast<std::size_t>(z)].integral(a, b);
    return {row(0), row.tail(d_)};
}

double ForwardCurveModel::forward_rate(double x, const Vector& y, int z) const {
    check_state(x, y, z);
    const auto [c, u] = curve_at(x, z);
    return c + u.dot(y);
}

std::pair<double, Vector> ForwardCurveModel::hjm_coefficients(double x, int z, const Matrix& sigma,
                                                              const Vector& b) const {
    if (z < 0 || z >= n_) throw validation_error("regime index out of range");
    if (sigma.rows() != d_ || sigma.cols() != d_ || b.size() != d_) {
        throw validation_error("coefficient dimensions do not match the model");
    }
    const Vector u = curve_at(x, z).second;
    return {u.dot(b), sigma.transpose() * u};
}

double ForwardCurveModel::bond_price(double tau, const Vector& y, int z) const {
    if (kind_ != MarketKind::rates) throw validation_error("bond_price needs a rates model");
    check_state(tau, y, z);
    const auto [ic, iu] = curve_integral(0.0, tau, z);
    return std::exp(-(ic + iu.dot(y)));
}

double ForwardCurveModel::futures_price(double x1, double x2, const Vector& y, int z) const {
    if (kind_ != MarketKind::energy) throw validation_error("futures_price needs an energy model");
    check_state(x1, y, z);
    check_state(x2, y, z);
    if (!(x1 < x2)) throw validation_error("delivery interval is degenerate");
    const auto [ic, iu] = curve_integral(x1, x2, z);
    return (ic + iu.dot(y)) / (x2 - x1);
}

double ForwardCurveModel::short_rate(const Vector& y, int z) const {
    return forward_rate(0.0, y, z);
}

} // namespace rcurve

#ifndef RCURVE_MARKET_HPP
#define RCURVE_MARKET_HPP

#include <utility>
#include <variant>
#include <vector>

#include "rcurve/energy.hpp"
#include "rcurve/gridfn.hpp"
#include "rcurve/rates.hpp"

namespace rcurve {

enum class MarketKind { energy, rates };

/// Solved curve model: the affine forward curve f(x) = c(x,z) + <u(x,z), y>
/// with per-regime prefix integrals so bond and futures prices are O(1) per
/// query. Curves are interpolated linearly between grid nodes.
class ForwardCurveModel {
public:
    static ForwardCurveModel from_energy(EnergyCurveParams params, const EnergyCurveGrid& curves);
    static ForwardCurveModel from_rates(RateCurveParams params, const RateCurveGrid& curves);

    MarketKind kind() const { return kind_; }
    int regimes() const { return n_; }
    int factors() const { return d_; }
    double discount_rate() const { return r_; }
    double span() const { return span_; }

    const EnergyCurveParams& energy_params() const;
    const RateCurveParams& rate_params() const;
    const EnergyCurveGrid& energy_curves() const;
    const RateCurveGrid& rate_curves() const;

    double forward_rate(double x, const Vector& y, int z) const;
    /// (c(x,z), u(x,z)) with linear interpolation.
    std::pair<double, Vector> curve_at(double x, int z) const;
    /// (integral of c over [a,b], integral of u over [a,b]) componentwise.
    std::pair<double, Vector> curve_integral(double a, double b, int z) const;

    /// HJM drift and volatility loading: beta = <u(x,z), b>, Sigma = u(x,z)^T sigma.
    std::pair<double, Vector> hjm_coefficients(double x, int z, const Matrix& sigma,
                                               const Vector& b) const;

    double bond_price(double tau, const Vector& y, int z) const;
    double futures_price(double x1, double x2, const Vector& y, int z) const;
    double short_rate(const Vector& y, int z) const;

private:
    ForwardCurveModel() = default;

    void check_state(double x, const Vector& y, int z) const;

    MarketKind kind_ = MarketKind::energy;
    int n_ = 0;
    int d_ = 0;
    double r_ = 0.0;
    double span_ = 0.0;
    std::variant<EnergyCurveParams, RateCurveParams> params_;
    std::variant<EnergyCurveGrid, RateCurveGrid> curves_;
    // Per regime: values stacked as (c(x,z), u_1(x,z), ..., u_d(x,z)).
    std::vector<GridFunction> stacked_;
    std::vector<IntegralTable> tables_;
};

} // namespace rcurve

#endif

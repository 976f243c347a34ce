#ifndef RCURVE_ENERGY_HPP
#define RCURVE_ENERGY_HPP

#include <optional>
#include <vector>

#include "rcurve/regime.hpp"

namespace rcurve {

/// Parameters of the energy-futures curve system. beta[i] (i = 0..d) stores
/// the drift coefficient vectors per regime as d x n matrices: column j is
/// beta_i(e_j). u0 is d x n (column per regime), c0 has one entry per regime.
struct EnergyCurveParams {
    int n = 0;
    int d = 0;
    double r = 0.0; // constant discount rate, > 0
    std::optional<GeneratorMatrix> Q;
    std::vector<Matrix> beta; // d+1 entries, each d x n
    Matrix u0;                // d x n
    Vector c0;                // n

    void validate() const;
    const GeneratorMatrix& generator() const { return *Q; }
};

/// Solution curves on the x-grid: u[k] is the d x n loading matrix at x_k
/// (column per regime), c[k] the n-vector of level curves.
struct EnergyCurveGrid {
    std::vector<double> grid;
    std::vector<Matrix> u;
    std::vector<Vector> c;

    /// Curve values per regime as GridFunctions (u columns stacked / c).
    GridFunction u_gridfn() const; // dim d*n, column-major per regime
    GridFunction c_gridfn() const; // dim n
};

/// Right-hand side of the loading-curve ODE:
/// (L u)_j = sum_i <beta_i(e_j), u_j> e_i - r u_j + sum_k q_{jk} u_k.
Matrix apply_L(const Matrix& u_state, const EnergyCurveParams& params);

/// Right-hand side of the level-curve homogeneous part: Q c - r c.
Vector apply_M(const Vector& c_state, const EnergyCurveParams& params);

/// Forcing term of the level equation: (<beta_0(e_j), u_j>)_j.
Vector beta0_forcing(const Matrix& u_state, const EnergyCurveParams& params);

/// RK4 solution of the coupled system u' = L u, c' = M c + beta_0-forcing
/// with initial values (u0, c0). Grid must start at 0.
EnergyCurveGrid solve_energy_curves(const EnergyCurveParams& params, const std::vector<double>& grid);

/// Closed-form loading curve for d = 1: expm(x (B - r I + Q)) u0, where
/// B = diag of the per-regime linear drift coefficients beta_1.
Vector closed_form_energy_u(const EnergyCurveParams& params, double x);

/// Printed closed-form level curve for d = 1 (diagnostic only; the ODE
/// solution is authoritative for c): B0 B1^{-1} expm(x (B1 - r I + Q)) c0.
Vector closed_form_energy_c(const EnergyCurveParams& params, double x);

} // namespace rcurve

#endif

#ifndef RCURVE_RATES_HPP
#define RCURVE_RATES_HPP

#include <functional>
#include <optional>
#include <vector>

#include "rcurve/regime.hpp"

namespace rcurve {

/// Polynomial in y (degree <= 4), one per regime, used for the quadratic
/// correction weights in the drift/diffusion decomposition.
struct Monomial {
    double coef = 0.0;
    std::vector<int> exps; // one exponent per factor
};

struct Polynomial {
    std::vector<Monomial> terms;
    double eval(const Vector& y) const;
    int degree() const;
};

/// One correction term: weight polynomials (per regime) times fixed (b, a).
/// The pair must satisfy <v(x),b> - 1/2 <v(x), a v(x)> = 0 along the solved
/// curve; see check_lambda_consistency.
struct LambdaTerm {
    Vector b;                       // d
    Matrix a;                       // d x d symmetric
    std::vector<Polynomial> lambda; // n entries, Lambda(., e_j)
};

/// Parameters of the interest-rate curve pipeline. The linear drift blocks
/// beta_1..beta_d (columns of beta_lin) and A_1..A_d are state-independent;
/// beta_0 (column per regime) and A_0 (one matrix per regime) may switch.
struct RateCurveParams {
    int n = 0;
    int d = 0;
    std::optional<GeneratorMatrix> Q;
    Vector u0;                 // d
    Vector c0;                 // n
    Matrix beta_lin;           // d x d, column i = beta_i
    std::vector<Matrix> A_lin; // d entries, each d x d symmetric
    Matrix beta0;              // d x n, column per regime
    std::vector<Matrix> A0;    // n entries, each d x d symmetric
    std::vector<LambdaTerm> lambda_terms;

    void validate() const;
    const GeneratorMatrix& generator() const { return *Q; }
};

/// Riccati right-hand side: u0 + sum_i <beta_i, v> e_i - 1/2 sum_i <v, A_i v> e_i.
/// This is also the loading curve u(x) when evaluated on the solution.
Vector riccati_rhs(const Vector& v, const RateCurveParams& params);

struct RiccatiSolution {
    GridFunction v; // integral of the loading curve, v(0) = 0
    GridFunction u; // analytic right-hand side along v, u(0) = u0
};

/// RK4 solution of v' = riccati_rhs(v), v(0) = 0. Throws numerical_error
/// with the blowup location if the solution explodes inside the grid.
RiccatiSolution solve_riccati(const RateCurveParams& params, const std::vector<double>& grid);

/// Closed-form loading curve for d = 1, branching on A_1 = 0, the degenerate
/// discriminant beta_1^2 + 2 u0 A_1 = 0 (within 1e-12), and the generic case
/// (evaluated through complex arithmetic so oscillatory solutions are covered).
double closed_form_rate_u(const RateCurveParams& params, double x);

/// H(x, e_j) = <v(x), beta_0(e_j)> - 1/2 <v(x), A_0(e_j) v(x)> on the grid of v.
GridFunction compute_H(const GridFunction& v, const Matrix& beta0, const std::vector<Matrix>& A0);

/// Pointwise H for a single regime at a given v value.
double h_value(const Vector& v, const Vector& beta0_z, const Matrix& A0_z);

/// Exponential-transform level system: wtilde' = (Q - C_0 - diag H(x)) wtilde,
/// wtilde(0) = (1,...,1). H is supplied as a callable so RK4 stages see it
/// exactly. Throws numerical_error if any component drops to <= 0.
GridFunction solve_wtilde(const std::function<Vector(double)>& H, const GeneratorMatrix& Q,
                          const Vector& c0, const std::vector<double>& grid);

/// c(x, e_i) = -wtilde_i'(x) / wtilde_i(x) with the derivative taken from the
/// ODE right-hand side (never finite differences).
GridFunction extract_c(const GridFunction& wtilde, const GridFunction& H, const GeneratorMatrix& Q,
                       const Vector& c0);

/// Closed-form wtilde when H does not depend on the regime:
/// exp(-int_0^x H(s) ds) expm(x (Q - C_0)) (1,...,1)^T.
Vector closed_form_wtilde(const std::function<double(double)>& H_scalar, const GeneratorMatrix& Q,
                          const Vector& c0, double x, int integration_cells = 2000);

/// Sup over the grid of |<v(x), b_i> - 1/2 <v(x), a_i v(x)>| per term.
std::vector<double> check_lambda_consistency(const GridFunction& v,
                                             const std::vector<LambdaTerm>& terms);

/// Acceptance threshold used by the construction pipeline for lambda terms.
double lambda_consistency_tolerance(const GridFunction& v);

/// Full pipeline output.
struct RateCurveGrid {
    std::vector<double> grid;
    GridFunction v;      // d
    GridFunction u;      // d
    GridFunction H;      // n
    GridFunction wtilde; // n
    GridFunction c;      // n
};

/// Riccati -> H -> wtilde -> c, integrated as one coupled system so every
/// RK4 stage is consistent. Rejects lambda terms failing the consistency check.
RateCurveGrid solve_rate_curves(const RateCurveParams& params, const std::vector<double>& grid);

/// Drift and diffusion of the factor process at (y, z):
/// b = sum Lambda_i(y,z) b_i + beta_0(z) + sum beta_i y_i, and the matching a.
/// a is symmetrized; throws numerical_error if a(y,z) is not PSD.
struct DriftDiffusion {
    Vector b;
    Matrix a;
};

DriftDiffusion assemble_drift_diffusion(const Vector& y, int z, const RateCurveParams& params);

} // namespace rcurve

#endif

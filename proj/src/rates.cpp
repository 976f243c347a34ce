#include "rcurve/rates.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace rcurve {

double Polynomial::eval(const Vector& y) const {
    double acc = 0.0;
    for (const auto& m : terms) {
        double t = m.coef;
        for (std::size_t i = 0; i < m.exps.size(); ++i)
            for (int e = 0; e < m.exps[i]; ++e) t *= y(static_cast<Eigen::Index>(i));
        acc += t;
    }
    return acc;
}

int Polynomial::degree() const {
    int deg = 0;
    for (const auto& m : terms) {
        int d = 0;
        for (int e : m.exps) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

void RateCurveParams::validate() const {
    if (n < 1 || d < 1)
        throw validation_error("rate params: n and d must be >= 1");
    if (!Q.has_value() || Q->size() != n)
        throw validation_error("rate params: generator missing or wrong size");
    if (u0.size() != d || !u0.allFinite())
        throw validation_error("rate params: u0 must be a finite d-vector");
    if (c0.size() != n || !c0.allFinite())
        throw validation_error("rate params: c0 must be a finite n-vector");
    if (beta_lin.rows() != d || beta_lin.cols() != d || !beta_lin.allFinite())
        throw validation_error("rate params: beta_lin must be finite d x d");
    if (static_cast<int>(A_lin.size()) != d)
        throw validation_error("rate params: need d linear A blocks");
    auto check_sym = [this](const Matrix& a, const char* name) {
        if (a.rows() != d || a.cols() != d || !a.allFinite())
            throw validation_error(std::string("rate params: ") + name + " must be finite d x d");
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))
            throw validation_error(std::string("rate params: ") + name + " must be symmetric");
    };
    for (const auto& a : A_lin) check_sym(a, "A_i");
    if (beta0.rows() != d || beta0.cols() != n || !beta0.allFinite())
        throw validation_error("rate params: beta0 must be finite d x n");
    if (static_cast<int>(A0.size()) != n)
        throw validation_error("rate params: need one A0 block per regime");
    for (const auto& a : A0) check_sym(a, "A_0");
    const std::size_t max_terms = static_cast<std::size_t>((d + 1) * (d + 2) / 2);
    if (lambda_terms.size() > max_terms)
        throw validation_error("rate params: too many lambda terms for this dimension");
    for (const auto& t : lambda_terms) {
        if (t.b.size() != d) throw validation_error("rate params: lambda term b must be a d-vector");
        check_sym(t.a, "lambda term a");
        if (static_cast<int>(t.lambda.size()) != n)
            throw validation_error("rate params: lambda term needs one polynomial per regime");
        for (const auto& p : t.lambda) {
            if (p.degree() > 4)
                throw validation_error("rate params: lambda polynomial degree exceeds 4");
            for (const auto& m : p.terms)
                if (static_cast<int>(m.exps.size()) != d)
                    throw validation_error("rate params: lambda monomial exponent length != d");
        }
    }
}

Vector riccati_rhs(const Vector& v, const RateCurveParams& params) {
    Vector out = params.u0;
    for (int i = 0; i < params.d; ++i) {
        out(i) += params.beta_lin.col(i).dot(v);
        out(i) -= 0.5 * v.dot(params.A_lin[static_cast<std::size_t>(i)] * v);
    }
    return out;
}

RiccatiSolution solve_riccati(const RateCurveParams& params, const std::vector<double>& grid) {
    params.validate();
    if (grid.empty() || grid.front() != 0.0)
        throw validation_error("solve_riccati: grid must start at 0");
    OdeRhs rhs = [&params](double, const Vector& v) { return riccati_rhs(v, params); };
    GridFunction v = rk4_solve(rhs, Vector::Zero(params.d), grid);
    std::vector<Vector> uvals;
    uvals.reserve(v.size());
    for (const auto& vk : v.values()) uvals.push_back(riccati_rhs(vk, params));
    return RiccatiSolution{std::move(v), GridFunction(grid, std::move(uvals))};
}

double closed_form_rate_u(const RateCurveParams& params, double x) {
    if (params.d != 1)
        throw validation_error("closed_form_rate_u: requires d = 1");
    const double beta1 = params.beta_lin(0, 0);
    const double a1 = params.A_lin[0](0, 0);
    const double u0 = params.u0(0);
    if (a1 == 0.0)
        return u0 * std::exp(beta1 * x);
    if (u0 == 0.0)
        return 0.0; // v == 0 solves the equation
    const double disc = beta1 * beta1 + 2.0 * u0 * a1;
    if (std::abs(disc) <= 1e-12) {
        // Double-root case: v' = -(a1/2) (v - beta1/a1)^2, pole at x = 2/beta1.
        const double shift = x - 2.0 / beta1;
        return -2.0 / (a1 * shift * shift);
    }
    const std::complex<double> gamma = std::sqrt(std::complex<double>(disc, 0.0));
    const std::complex<double> p = (beta1 + gamma) / a1;
    const std::complex<double> q = (beta1 - gamma) / a1;
    const std::complex<double> k = (p / q) * std::exp(-gamma * x);
    const std::complex<double> v = (p - k * q) / (1.0 - k);
    const std::complex<double> u = u0 + beta1 * v - 0.5 * a1 * v * v;
    return u.real();
}

double h_value(const Vector& v, const Vector& beta0_z, const Matrix& A0_z) {
    return v.dot(beta0_z) - 0.5 * v.dot(A0_z * v);
}

GridFunction compute_H(const GridFunction& v, const Matrix& beta0, const std::vector<Matrix>& A0) {
    const int n = static_cast<int>(beta0.cols());
    if (static_cast<int>(A0.size()) != n)
        throw validation_error("compute_H: beta0/A0 regime counts differ");
    std::vector<Vector> vals;
    vals.reserve(v.size());
    for (const auto& vk : v.values()) {
        Vector h(n);
        for (int j = 0; j < n; ++j)
            h(j) = h_value(vk, beta0.col(j), A0[static_cast<std::size_t>(j)]);
        vals.push_back(h);
    }
    return GridFunction(v.grid(), std::move(vals));
}

namespace {

void check_positive(const Vector& w, double x) {
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (!(w(i) > 0.0)) {
            std::ostringstream os;
            os << "wtilde positivity violated in component " << i << " near x = " << x
               << " (refine the grid step)";
            throw numerical_error(os.str());
        }
}

} // namespace

GridFunction solve_wtilde(const std::function<Vector(double)>& H, const GeneratorMatrix& Q,
                          const Vector& c0, const std::vector<double>& grid) {
    const int n = Q.size();
    if (c0.size() != n)
        throw validation_error("solve_wtilde: c0 size mismatch");
    const Matrix& q = Q.q();
    OdeRhs rhs = [&](double x, const Vector& w) -> Vector {
        Vector h = H(x);
        return q * w - c0.cwiseProduct(w) - h.cwiseProduct(w);
    };
    GridFunction w = rk4_solve(rhs, Vector::Ones(n), grid);
    for (std::size_t k = 0; k < w.size(); ++k) check_positive(w.values()[k], grid[k]);
    return w;
}

GridFunction extract_c(const GridFunction& wtilde, const GridFunction& H, const GeneratorMatrix& Q,
                       const Vector& c0) {
    if (wtilde.size() != H.size())
        throw validation_error("extract_c: wtilde/H grids differ");
    const Matrix& q = Q.q();
    std::vector<Vector> vals;
    vals.reserve(wtilde.size());
    for (std::size_t k = 0; k < wtilde.size(); ++k) {
        const Vector& w = wtilde.values()[k];
        check_positive(w, wtilde.grid()[k]);
        Vector dw = q * w - c0.cwiseProduct(w) - H.values()[k].cwiseProduct(w);
        vals.push_back(-dw.cwiseQuotient(w));
    }
    return GridFunction(wtilde.grid(), std::move(vals));
}

Vector closed_form_wtilde(const std::function<double(double)>& H_scalar, const GeneratorMatrix& Q,
                          const Vector& c0, double x, int integration_cells) {
    // Simpson integral of H over [0, x].
    double ih = 0.0;
    if (x > 0.0) {
        const double h = x / (2 * integration_cells);
        ih = H_scalar(0.0) + H_scalar(x);
        for (int k = 1; k < 2 * integration_cells; ++k)
            ih += (k % 2 == 1 ? 4.0 : 2.0) * H_scalar(k * h);
        ih *= h / 3.0;
    }
    Matrix shifted = Q.q();
    shifted -= Matrix(c0.asDiagonal());
    return std::exp(-ih) * (expm(x * shifted) * Vector::Ones(c0.size()));
}

std::vector<double> check_lambda_consistency(const GridFunction& v,
                                             const std::vector<LambdaTerm>& terms) {
    std::vector<double> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        double sup = 0.0;
        for (const auto& vk : v.values())
            sup = std::max(sup, std::abs(vk.dot(t.b) - 0.5 * vk.dot(t.a * vk)));
        out.push_back(sup);
    }
    return out;
}

double lambda_consistency_tolerance(const GridFunction& v) {
    double sup2 = 0.0;
    for (const auto& vk : v.values()) sup2 = std::max(sup2, vk.squaredNorm());
    return 1e-6 * (1.0 + sup2);
}

RateCurveGrid solve_rate_curves(const RateCurveParams& params, const std::vector<double>& grid) {
    params.validate();
    if (grid.empty() || grid.front() != 0.0)
        throw validation_error("solve_rate_curves: grid must start at 0");

    const int d = params.d, n = params.n;
    const Matrix& q = params.generator().q();

    // Coupled system (v, wtilde) so every RK4 stage sees a consistent H(v).
    OdeRhs rhs = [&](double, const Vector& y) -> Vector {
        Vector v = y.head(d);
        Vector w = y.tail(n);
        Vector dv = riccati_rhs(v, params);
        Vector h(n);
        for (int j = 0; j < n; ++j)
            h(j) = h_value(v, params.beta0.col(j), params.A0[static_cast<std::size_t>(j)]);
        Vector dw = q * w - params.c0.cwiseProduct(w) - h.cwiseProduct(w);
        Vector dy(d + n);
        dy << dv, dw;
        return dy;
    };

    Vector y0(d + n);
    y0 << Vector::Zero(d), Vector::Ones(n);
    GridFunction sol = rk4_solve(rhs, y0, grid);

    std::vector<Vector> vv, uu, hh, ww;
    vv.reserve(sol.size());
    uu.reserve(sol.size());
    hh.reserve(sol.size());
    ww.reserve(sol.size());
    for (std::size_t k = 0; k < sol.size(); ++k) {
        Vector v = sol.values()[k].head(d);
        Vector w = sol.values()[k].tail(n);
        check_positive(w, grid[k]);
        Vector h(n);
        for (int j = 0; j < n; ++j)
            h(j) = h_value(v, params.beta0.col(j), params.A0[static_cast<std::size_t>(j)]);
        vv.push_back(std::move(v));
        uu.push_back(riccati_rhs(vv.back(), params));
        hh.push_back(std::move(h));
        ww.push_back(std::move(w));
    }

    RateCurveGrid out;
    out.grid = grid;
    out.v = GridFunction(grid, std::move(vv));
    out.u = GridFunction(grid, std::move(uu));
    out.H = GridFunction(grid, std::move(hh));
    out.wtilde = GridFunction(grid, std::move(ww));
    out.c = extract_c(out.wtilde, out.H, params.generator(), params.c0);

    if (!params.lambda_terms.empty()) {
        const double tol = lambda_consistency_tolerance(out.v);
        auto residuals = check_lambda_consistency(out.v, params.lambda_terms);
        for (std::size_t i = 0; i < residuals.size(); ++i)
            if (residuals[i] > tol) {
                std::ostringstream os;
                os << "lambda term " << i << " is inconsistent with the solved curve (residual "
                   << residuals[i] << " > " << tol << ")";
                throw numerical_error(os.str());
            }
    }
    return out;
}

DriftDiffusion assemble_drift_diffusion(const Vector& y, int z, const RateCurveParams& params) {
    if (y.size() != params.d)
        throw validation_error("assemble_drift_diffusion: y must be a d-vector");
    if (z < 0 || z >= params.n)
        throw validation_error("assemble_drift_diffusion: regime out of range");

    Vector b = params.beta0.col(z);
    Matrix a = params.A0[static_cast<std::size_t>(z)];
    for (int i = 0; i < params.d; ++i) {
        b += params.beta_lin.col(i) * y(i);
        a += params.A_lin[static_cast<std::size_t>(i)] * y(i);
    }
    for (const auto& t : params.lambda_terms) {
        const double lam = t.lambda[static_cast<std::size_t>(z)].eval(y);
        b += lam * t.b;
        a += lam * t.a;
    }
    a = 0.5 * (a + a.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
        std::ostringstream os;
        os << "diffusion matrix a(y,z) is not positive semidefinite at regime " << z
           << " (min eigenvalue " << es.eigenvalues().minCoeff() << "); no volatility square root exists";
        throw numerical_error(os.str());
    }
    return DriftDiffusion{std::move(b), std::move(a)};
}

} // namespace rcurve

#include "rcurve/noarb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rcurve/errors.hpp"
#include "rcurve/rng.hpp"

namespace rcurve {

std::vector<ResidualProbe> make_probes(int d, int n_regimes, int count, double x_max,
                                       std::uint64_t seed, bool nonnegative_y) {
    if (d < 1 || n_regimes < 1 || count < 1 || !(x_max > 0.0)) {
        throw validation_error("invalid probe request");
    }
    RngStream rng(seed);
    std::vector<ResidualProbe> probes(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        auto& p = probes[static_cast<std::size_t>(k)];
        p.x = rng.uniform() * x_max;
        p.y = Vector(d);
        for (int i = 0; i < d; ++i) {
            p.y(i) = nonnegative_y ? rng.uniform() : (2.0 * rng.uniform() - 1.0);
        }
        p.z = k % n_regimes;
    }
    return probes;
}

namespace {

void record(ResidualReport& report, const ResidualProbe& p, double lhs, double rhs) {
    ResidualSample s;
    s.x = p.x;
    s.z = p.z;
    s.y = p.y;
    s.lhs = lhs;
    s.rhs = rhs;
    s.residual = lhs - rhs;
    report.sup_residual = std::max(report.sup_residual, std::abs(s.residual));
    report.samples.push_back(std::move(s));
}

} // namespace

ResidualReport energy_drift_residual(const ForwardCurveModel& model,
                                     const std::vector<ResidualProbe>& probes,
                                     std::optional<double> r_override) {
    const EnergyCurveParams& params = model.energy_params();
    // The slope terms always use the model's own parameters (they describe
    // the stored curve); r_override enters only through the discount term.
    const double r_eval = r_override.value_or(params.r);
    const Matrix& q = params.generator().q();
    const int n = params.n;
    const int d = params.d;

    ResidualReport report;
    for (const auto& p : probes) {
        if (p.y.size() != d) throw validation_error("probe state has wrong dimension");
        if (p.z < 0 || p.z >= n) throw validation_error("probe regime out of range");
        Matrix U(d, n);
        Vector cvec(n);
        for (int j = 0; j < n; ++j) {
            const auto [cj, uj] = model.curve_at(p.x, j);
            cvec(j) = cj;
            U.col(j) = uj;
        }
        const Matrix dxU = apply_L(U, params);
        const Vector dxc = apply_M(cvec, params) + beta0_forcing(U, params);

        Vector b = params.beta[0].col(p.z);
        for (int i = 1; i <= d; ++i) b += params.beta[static_cast<std::size_t>(i)].col(p.z) * p.y(i - 1);

        const Vector uz = U.col(p.z);
        const double lhs = uz.dot(b);
        double jump = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == p.z) continue;
            jump += ((cvec(j) - cvec(p.z)) + (U.col(j) - uz).dot(p.y)) * q(p.z, j);
        }
        const double rhs = dxc(p.z) + dxU.col(p.z).dot(p.y) +
                           r_eval * (uz.dot(p.y) + cvec(p.z)) - jump;
        record(report, p, lhs, rhs);
    }
    return report;
}

ResidualReport rate_drift_residual(const ForwardCurveModel& model,
                                   const std::vector<ResidualProbe>& probes,
                                   const std::optional<Vector>& c_shift) {
    const RateCurveParams& params = model.rate_params();
    const RateCurveGrid& grid = model.rate_curves();
    const Matrix& q = params.generator().q();
    const int n = params.n;
    const int d = params.d;
    Vector shift = Vector::Zero(n);
    if (c_shift) {
        if (c_shift->size() != n) throw validation_error("level shift needs one entry per regime");
        shift = *c_shift;
    }

    ResidualReport report;
    for (const auto& p : probes) {
        if (p.y.size() != d) throw validation_error("probe state has wrong dimension");
        if (p.z < 0 || p.z >= n) throw validation_error("probe regime out of range");

        const Vector v = grid.v.at(p.x);
        const Vector u = grid.u.at(p.x);
        const Vector H = grid.H.at(p.x);
        const Vector w = grid.wtilde.at(p.x);

        // Level curve and its slope from the transform ODE, never differenced.
        const Vector wp = q * w - params.c0.cwiseProduct(w) - H.cwiseProduct(w);
        Vector Hp(n);
        for (int j = 0; j < n; ++j) {
            Hp(j) = u.dot(params.beta0.col(j)) - u.dot(params.A0[static_cast<std::size_t>(j)] * v);
        }
        const Vector wpp =
            q * wp - params.c0.cwiseProduct(wp) - H.cwiseProduct(wp) - Hp.cwiseProduct(w);
        const Vector c = -wp.cwiseQuotient(w);
        const double dxc = -wpp(p.z) / w(p.z) + c(p.z) * c(p.z);

        Vector dxu(d);
        for (int i = 0; i < d; ++i) {
            dxu(i) = params.beta_lin.col(i).dot(u) - v.dot(params.A_lin[static_cast<std::size_t>(i)] * u);
        }

        const DriftDiffusion dd = assemble_drift_diffusion(p.y, p.z, params);
        const double lhs = u.dot(dd.b);
        const double convexity = u.dot(dd.a * v);

        const double wz = model.curve_integral(0.0, p.x, p.z).first + shift(p.z) * p.x;
        double jump = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == p.z) continue;
            const double wj = model.curve_integral(0.0, p.x, j).first + shift(j) * p.x;
            jump += ((c(j) + shift(j)) - (c(p.z) + shift(p.z))) * std::exp(wz - wj) * q(p.z, j);
        }
        const double rhs = dxu.dot(p.y) + dxc + convexity - jump;
        record(report, p, lhs, rhs);
    }
    return report;
}

std::string contract_id(const Contract& contract) {
    char buf[64];
    if (const auto* fc = std::get_if<FuturesContract>(&contract)) {
        std::snprintf(buf, sizeof buf, "futures[%g,%g]", fc->T1, fc->T2);
    } else {
        std::snprintf(buf, sizeof buf, "bond[%g]", std::get<BondContract>(contract).T);
    }
    return buf;
}

double MartingaleReport::max_abs_z() const {
    double m = 0.0;
    for (const auto& cp : checkpoints) m = std::max(m, std::abs(cp.z_stat));
    return m;
}

MartingaleReport martingale_test(const ForwardCurveModel& model, const DiffusionSpec& spec,
                                 const std::vector<Contract>& contracts,
                                 const std::vector<double>& t_checkpoints, int n_paths, double dt,
                                 std::uint64_t seed) {
    if (contracts.empty() || t_checkpoints.empty()) {
        throw validation_error("need at least one contract and one checkpoint");
    }
    const bool energy = model.kind() == MarketKind::energy;
    double min_maturity = std::numeric_limits<double>::infinity();
    for (const auto& c : contracts) {
        if (const auto* fc = std::get_if<FuturesContract>(&c)) {
            if (!energy) throw validation_error("futures contract on a rates model");
            if (!(0.0 <= fc->T1 && fc->T1 < fc->T2)) {
                throw validation_error("futures contract needs 0 <= T1 < T2");
            }
            min_maturity = std::min(min_maturity, fc->T1);
        } else {
            if (energy) throw validation_error("bond contract on an energy model");
            const double T = std::get<BondContract>(c).T;
            if (!(T > 0.0)) throw validation_error("bond maturity must be positive");
            min_maturity = std::min(min_maturity, T);
        }
    }

    double horizon = 0.0;
    std::vector<long long> cp_steps;
    for (double t : t_checkpoints) {
        if (!(t > 0.0) || t > min_maturity) {
            throw validation_error("checkpoints must lie in (0, min contract maturity]");
        }
        const long long k = std::llround(t / dt);
        if (std::abs(static_cast<double>(k) * dt - t) > 1e-9) {
            throw validation_error("checkpoint is not a multiple of the step size");
        }
        cp_steps.push_back(k);
        horizon = std::max(horizon, t);
    }

    const std::size_t n_cells = contracts.size() * t_checkpoints.size();
    std::vector<double> sum(n_cells, 0.0), sumsq(n_cells, 0.0);
    std::vector<double> reference(contracts.size());
    for (std::size_t ci = 0; ci < contracts.size(); ++ci) {
        if (const auto* fc = std::get_if<FuturesContract>(&contracts[ci])) {
            reference[ci] = model.futures_price(fc->T1, fc->T2, spec.y0, spec.z0);
        } else {
            reference[ci] = model.bond_price(std::get<BondContract>(contracts[ci]).T, spec.y0, spec.z0);
        }
    }

    const GeneratorMatrix& Q = energy ? model.energy_params().generator()
                                      : model.rate_params().generator();
    const double r = model.discount_rate();
    std::vector<std::size_t> order(t_checkpoints.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return cp_steps[a] < cp_steps[b]; });

    for_each_path(spec, Q, dt, horizon, n_paths, seed, [&](int, const PathSample& path) {
        // One pass over the path accumulating the pathwise discount factor.
        double log_disc = 0.0;
        long long step = 0;
        for (const std::size_t ti : order) {
            const long long target = cp_steps[ti];
            if (!energy) {
                for (; step < target; ++step) {
                    log_disc -= model.short_rate(path.y[static_cast<std::size_t>(step)],
                                                 path.z[static_cast<std::size_t>(step)]) * dt;
                }
            }
            const double t = t_checkpoints[ti];
            const double disc = energy ? std::exp(-r * t) : std::exp(log_disc);
            const auto idx = static_cast<std::size_t>(target);
            const Vector& y = path.y[idx];
            const int z = path.z[idx];
            for (std::size_t ci = 0; ci < contracts.size(); ++ci) {
                double price;
                if (const auto* fc = std::get_if<FuturesContract>(&contracts[ci])) {
                    price = model.futures_price(fc->T1 - t, fc->T2 - t, y, z);
                } else {
                    price = model.bond_price(std::get<BondContract>(contracts[ci]).T - t, y, z);
                }
                const double val = disc * price;
                const std::size_t cell = ti * contracts.size() + ci;
                sum[cell] += val;
                sumsq[cell] += val * val;
            }
        }
    });

    MartingaleReport report;
    report.n_paths = n_paths;
    report.dt = dt;
    report.seed = seed;
    const auto N = static_cast<double>(n_paths);
    for (std::size_t ti = 0; ti < t_checkpoints.size(); ++ti) {
        for (std::size_t ci = 0; ci < contracts.size(); ++ci) {
            const std::size_t cell = ti * contracts.size() + ci;
            MartingaleCheckpoint cp;
            cp.t = t_checkpoints[ti];
            cp.contract = contract_id(contracts[ci]);
            cp.reference = reference[ci];
            cp.mean_discounted = sum[cell] / N;
            double var = 0.0;
            if (n_paths > 1) {
                var = std::max(0.0, (sumsq[cell] - N * cp.mean_discounted * cp.mean_discounted) /
                                        (N - 1.0));
            }
            // Degenerate (zero-variance) runs still get a positive standard
            // error so the z-statistic stays finite.
            const double floor = 1e-9 * (1.0 + std::abs(cp.reference));
            cp.std_error = std::max(std::sqrt(var / N), floor);
            cp.z_stat = (cp.mean_discounted - cp.reference) / cp.std_error;
            report.checkpoints.push_back(std::move(cp));
        }
    }
    return report;
}

} // namespace rcurve

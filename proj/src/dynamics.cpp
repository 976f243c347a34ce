#include "rcurve/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcurve/errors.hpp"
#include "rcurve/rng.hpp"

namespace rcurve {

namespace {

Matrix vol_at(const VolSpec& vol, const Vector& y, int z) {
    if (const auto* mv = std::get_if<MatrixVol>(&vol)) {
        return mv->sigma.at(static_cast<std::size_t>(z));
    }
    const auto& av = std::get<AffineSqrtVol>(vol);
    Matrix s = av.sigma0.at(static_cast<std::size_t>(z));
    const auto& terms = av.sigma_i.at(static_cast<std::size_t>(z));
    for (int i = 0; i < y.size(); ++i) {
        s += terms.at(static_cast<std::size_t>(i)) * std::sqrt(std::max(y(i), 0.0));
    }
    return s;
}

PathSample make_path(const DiffusionSpec& spec, const GeneratorMatrix& Q, double dt,
                     double horizon, int path_id, std::uint64_t seed) {
    const auto k = static_cast<std::uint64_t>(path_id);
    RngStream regime_rng = RngStream::substream(seed, 2 * k);
    RngStream noise_rng = RngStream::substream(seed, 2 * k + 1);

    PathSample path;
    path.regime_path = sample_regime_path(Q, spec.z0, horizon, regime_rng);

    const int n_steps = static_cast<int>(std::llround(horizon / dt));
    const int d = static_cast<int>(spec.y0.size());
    path.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.y.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.z.reserve(static_cast<std::size_t>(n_steps) + 1);

    Vector y = spec.y0;
    path.times.push_back(0.0);
    path.y.push_back(y);
    path.z.push_back(path.regime_path.state_at(0.0));

    const bool truncate = std::holds_alternative<AffineSqrtVol>(spec.vol);
    const double sqdt = std::sqrt(dt);
    Vector dw(d);
    for (int step = 0; step < n_steps; ++step) {
        const double t = step * dt;
        const int z = path.regime_path.state_at(t);
        Vector yc = y;
        if (truncate) yc = yc.cwiseMax(0.0);
        for (int i = 0; i < d; ++i) dw(i) = noise_rng.normal() * sqdt;
        y += spec.drift(yc, z) * dt + vol_at(spec.vol, yc, z) * dw;
        if (!y.allFinite()) {
            throw numerical_error("factor path " + std::to_string(path_id) +
                                  " exploded near t = " + std::to_string(t + dt));
        }
        const double tn = (step + 1 == n_steps) ? horizon : (step + 1) * dt;
        path.times.push_back(tn);
        path.y.push_back(y);
        path.z.push_back(path.regime_path.state_at(tn));
    }
    return path;
}

void check_spec(const DiffusionSpec& spec, const GeneratorMatrix& Q, double dt, double horizon,
                int n_paths) {
    if (!spec.drift) throw validation_error("diffusion spec has no drift");
    if (spec.y0.size() == 0) throw validation_error("diffusion spec has empty initial state");
    if (spec.z0 < 0 || spec.z0 >= Q.size()) {
        throw validation_error("initial regime out of range");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw validation_error("step size must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw validation_error("horizon must be positive");
    }
    if (horizon < dt) throw validation_error("horizon shorter than one step");
    if (n_paths <= 0) throw validation_error("path count must be positive");
    const int d = static_cast<int>(spec.y0.size());
    auto check_dim = [d](const Matrix& m, const char* what) {
        if (m.rows() != d || m.cols() != d) {
            throw validation_error(std::string(what) + " must be d x d");
        }
        if (!m.allFinite()) throw validation_error(std::string(what) + " has non-finite entries");
    };
    const auto n_regimes = static_cast<std::size_t>(Q.size());
    if (const auto* mv = std::get_if<MatrixVol>(&spec.vol)) {
        if (mv->sigma.size() != n_regimes) {
            throw validation_error("need one volatility matrix per regime");
        }
        for (const auto& m : mv->sigma) check_dim(m, "volatility matrix");
    } else {
        const auto& av = std::get<AffineSqrtVol>(spec.vol);
        if (av.sigma0.size() != n_regimes || av.sigma_i.size() != n_regimes) {
            throw validation_error("need one volatility block per regime");
        }
        for (const auto& m : av.sigma0) check_dim(m, "volatility matrix");
        for (const auto& terms : av.sigma_i) {
            if (terms.size() != static_cast<std::size_t>(d)) {
                throw validation_error("need one sqrt volatility matrix per factor");
            }
            for (const auto& m : terms) check_dim(m, "volatility matrix");
        }
    }
}

} // namespace

int interpolate_regime(const PathSample& path, double t) { return path.regime_path.state_at(t); }

std::vector<PathSample> simulate_paths(const DiffusionSpec& spec, const GeneratorMatrix& Q,
                                       double dt, double horizon, int n_paths,
                                       std::uint64_t seed) {
    check_spec(spec, Q, dt, horizon, n_paths);
    std::vector<PathSample> paths;
    paths.reserve(static_cast<std::size_t>(n_paths));
    for (int k = 0; k < n_paths; ++k) {
        paths.push_back(make_path(spec, Q, dt, horizon, k, seed));
    }
    return paths;
}

void for_each_path(const DiffusionSpec& spec, const GeneratorMatrix& Q, double dt, double horizon,
                   int n_paths, std::uint64_t seed,
                   const std::function<void(int, const PathSample&)>& callback) {
    check_spec(spec, Q, dt, horizon, n_paths);
    for (int k = 0; k < n_paths; ++k) {
        const PathSample path = make_path(spec, Q, dt, horizon, k, seed);
        callback(k, path);
    }
}

} // namespace rcurve

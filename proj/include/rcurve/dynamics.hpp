#ifndef RCURVE_DYNAMICS_HPP
#define RCURVE_DYNAMICS_HPP

#include <functional>
#include <variant>
#include <vector>

#include "rcurve/regime.hpp"

namespace rcurve {

/// Explicit per-regime volatility matrix sigma(z).
struct MatrixVol {
    std::vector<Matrix> sigma; // one d x d matrix per regime
};

/// sigma(y, z) = sigma0(z) + sum_i sigma_i(z) sqrt(max(y_i, 0)).
struct AffineSqrtVol {
    std::vector<Matrix> sigma0;              // per regime
    std::vector<std::vector<Matrix>> sigma_i; // per regime, then per factor
};

using VolSpec = std::variant<MatrixVol, AffineSqrtVol>;

/// Factor-process specification: drift callback b(y, z), volatility family,
/// and starting state. Regimes are 0-based.
struct DiffusionSpec {
    std::function<Vector(const Vector&, int)> drift;
    VolSpec vol;
    Vector y0;
    int z0 = 0;
};

/// One joint trajectory sampled on a uniform time grid.
struct PathSample {
    std::vector<double> times;
    std::vector<Vector> y;
    std::vector<int> z;
    RegimePath regime_path;
};

/// Right-continuous regime value along a sampled path.
int interpolate_regime(const PathSample& path, double t);

/// Euler-Maruyama with the regime frozen over each step. With square-root
/// volatility the scheme is fully truncated: drift and diffusion are both
/// evaluated at max(y, 0) componentwise. Path k draws from a stream derived
/// from (seed, k), so output does not depend on evaluation order.
std::vector<PathSample> simulate_paths(const DiffusionSpec& spec, const GeneratorMatrix& Q,
                                       double dt, double horizon, int n_paths,
                                       std::uint64_t seed);

/// Streaming variant for large path counts: each path is generated, handed to
/// the callback, and discarded. Identical path content to simulate_paths.
void for_each_path(const DiffusionSpec& spec, const GeneratorMatrix& Q, double dt, double horizon,
                   int n_paths, std::uint64_t seed,
                   const std::function<void(int, const PathSample&)>& callback);

} // namespace rcurve

#endif

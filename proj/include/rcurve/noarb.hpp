#ifndef RCURVE_NOARB_HPP
#define RCURVE_NOARB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rcurve/dynamics.hpp"
#include "rcurve/market.hpp"

namespace rcurve {

struct ResidualProbe {
    double x = 0.0;
    Vector y;
    int z = 0;
};

struct ResidualSample {
    double x = 0.0;
    int z = 0;
    Vector y;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

struct ResidualReport {
    double sup_residual = 0.0;
    std::vector<ResidualSample> samples;
};

/// Deterministic probe set: y uniform on [-1,1]^d (clamped to [0,1]^d when
/// nonnegative_y is set, for square-root volatilities), x uniform on
/// [0, x_max], regimes cycled exhaustively.
std::vector<ResidualProbe> make_probes(int d, int n_regimes, int count, double x_max,
                                       std::uint64_t seed, bool nonnegative_y);

/// Futures drift-condition residual per probe: <u(x,z), b(y,z)> against the
/// curve-slope, discounting, and regime-jump terms. Slopes come from the ODE
/// right-hand side evaluated on the interpolated curve state, never finite
/// differences. r_override replaces the model rate in the evaluation only
/// (diagnostic perturbation).
ResidualReport energy_drift_residual(const ForwardCurveModel& model,
                                     const std::vector<ResidualProbe>& probes,
                                     std::optional<double> r_override = std::nullopt);

/// Bond drift-condition residual per probe, including the convexity term
/// <u, a(y,z) v> and the jump-compensation sum with exp-integrated level
/// spreads. c_shift (one entry per regime) perturbs the level curve in the
/// evaluation only.
ResidualReport rate_drift_residual(const ForwardCurveModel& model,
                                   const std::vector<ResidualProbe>& probes,
                                   const std::optional<Vector>& c_shift = std::nullopt);

struct FuturesContract {
    double T1 = 0.0;
    double T2 = 0.0;
};

struct BondContract {
    double T = 0.0;
};

using Contract = std::variant<FuturesContract, BondContract>;

std::string contract_id(const Contract& contract);

struct MartingaleCheckpoint {
    double t = 0.0;
    std::string contract;
    double mean_discounted = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
    double z_stat = 0.0;
};

struct MartingaleReport {
    std::vector<MartingaleCheckpoint> checkpoints;
    int n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;

    double max_abs_z() const;
};

/// Monte-Carlo martingale check of discounted prices at fixed checkpoints.
/// Energy models discount with exp(-r t); rates models with a left-point
/// Riemann sum of the path short rate. Reference is the time-0 price. Paths
/// are streamed, one at a time, and reduced in path order (deterministic).
MartingaleReport martingale_test(const ForwardCurveModel& model, const DiffusionSpec& spec,
                                 const std::vector<Contract>& contracts,
                                 const std::vector<double>& t_checkpoints, int n_paths, double dt,
                                 std::uint64_t seed);

} // namespace rcurve

#endif

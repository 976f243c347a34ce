#ifndef RCURVE_CONFIG_HPP
#define RCURVE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "rcurve/dynamics.hpp"
#include "rcurve/energy.hpp"
#include "rcurve/market.hpp"
#include "rcurve/rates.hpp"

namespace rcurve {

struct GridSpec {
    double x_max = 10.0;
    double x_step = 1e-3;

    std::vector<double> make() const;
};

struct SimSpec {
    double dt = 1e-3;
    double horizon = 1.0;
    int n_paths = 1000;
    std::uint64_t seed = 42;
};

struct VerifySpec {
    int n_probes = 200;
    double probe_x_max = 5.0;
    std::vector<double> checkpoints{0.5, 1.0};
    double futures_T1 = 2.0; // energy contract [T1, T2]
    double futures_T2 = 3.0;
    double bond_T = 3.0; // rates contract maturity
    double z_max = 4.0;
    double residual_tol_energy = 1e-6;
    double residual_tol_rates = 1e-5;
};

/// Parsed and validated model configuration. Exactly one of energy / rates
/// is populated. Regimes are 1-based in config files, 0-based here.
struct ModelConfig {
    MarketKind market = MarketKind::energy;
    std::optional<EnergyCurveParams> energy;
    std::optional<RateCurveParams> rates;
    VolSpec vol;
    Vector y0;
    int z0 = 0;
    GridSpec grid;
    SimSpec sim;
    VerifySpec verify;
    std::string canonical; // normalized JSON used for hashing
};

/// Parse + validate a config document; throws validation_error with the
/// offending field on any schema or consistency violation. For rates models
/// the declared volatility is checked against a(y,z) at sample states.
ModelConfig parse_config(const std::string& json_text);
ModelConfig load_config(const std::string& path);

/// FNV-1a over the normalized config document.
std::string config_hash(const ModelConfig& cfg);

/// Drift/volatility callbacks and initial state for the factor simulation.
DiffusionSpec make_diffusion_spec(const ModelConfig& cfg);

/// Run the curve-construction pipeline on the configured grid.
ForwardCurveModel build_model(const ModelConfig& cfg);

int config_regimes(const ModelConfig& cfg);
int config_factors(const ModelConfig& cfg);
const GeneratorMatrix& config_generator(const ModelConfig& cfg);

} // namespace rcurve

#endif

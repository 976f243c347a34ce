#include "rcurve/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rcurve/errors.hpp"

namespace rcurve {

using nlohmann::json;

std::vector<double> GridSpec::make() const {
    if (!(x_max > 0.0) || !(x_step > 0.0) || x_step > x_max) {
        throw validation_error("grid requires 0 < x_step <= x_max");
    }
    const auto m = static_cast<std::size_t>(std::llround(x_max / x_step));
    if (std::abs(static_cast<double>(m) * x_step - x_max) > 1e-9 * x_max) {
        throw validation_error("x_max must be a multiple of x_step");
    }
    std::vector<double> grid(m + 1);
    for (std::size_t i = 0; i <= m; ++i) grid[i] = static_cast<double>(i) * x_step;
    grid[m] = x_max;
    return grid;
}

namespace {

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw validation_error(std::string("missing config field '") + name + "'");
    return *it;
}

double num(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number()) throw validation_error(std::string("field '") + name + "' must be a number");
    return v.get<double>();
}

Vector parse_vector(const json& j, int len, const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != len) {
        throw validation_error("field '" + name + "' must be an array of length " +
                               std::to_string(len));
    }
    Vector v(len);
    for (int i = 0; i < len; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number()) {
            throw validation_error("field '" + name + "' must be numeric");
        }
        v(i) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

Matrix parse_matrix(const json& j, int rows, int cols, const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows) {
        throw validation_error("field '" + name + "' must have " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        m.row(i) = parse_vector(j[static_cast<std::size_t>(i)], cols, name + " row").transpose();
    }
    return m;
}

VolSpec parse_vol(const json& j, int n, int d) {
    const json& v = field(j, "vol");
    const std::string type = field(v, "type").get<std::string>();
    auto per_regime = [&](const json& arr, const std::string& name) {
        if (!arr.is_array() || static_cast<int>(arr.size()) != n) {
            throw validation_error("field '" + name + "' needs one entry per regime");
        }
        std::vector<Matrix> out;
        for (int z = 0; z < n; ++z) {
            out.push_back(parse_matrix(arr[static_cast<std::size_t>(z)], d, d, name));
        }
        return out;
    };
    if (type == "matrix") {
        return MatrixVol{per_regime(field(v, "sigma"), "vol.sigma")};
    }
    if (type == "affine_sqrt") {
        AffineSqrtVol av;
        av.sigma0 = per_regime(field(v, "sigma0"), "vol.sigma0");
        const json& si = field(v, "sigma_i");
        if (!si.is_array() || static_cast<int>(si.size()) != n) {
            throw validation_error("field 'vol.sigma_i' needs one entry per regime");
        }
        for (int z = 0; z < n; ++z) {
            const json& terms = si[static_cast<std::size_t>(z)];
            if (!terms.is_array() || static_cast<int>(terms.size()) != d) {
                throw validation_error("field 'vol.sigma_i' needs one matrix per factor");
            }
            std::vector<Matrix> row;
            for (int i = 0; i < d; ++i) {
                row.push_back(parse_matrix(terms[static_cast<std::size_t>(i)], d, d, "vol.sigma_i"));
            }
            av.sigma_i.push_back(std::move(row));
        }
        return av;
    }
    throw validation_error("vol.type must be 'matrix' or 'affine_sqrt'");
}

Polynomial parse_polynomial(const json& j, int d) {
    Polynomial p;
    if (!j.is_array()) throw validation_error("lambda polynomial must be an array of monomials");
    for (const auto& mj : j) {
        Monomial m;
        m.coef = num(mj, "coef");
        const json& ej = field(mj, "exps");
        if (!ej.is_array() || static_cast<int>(ej.size()) != d) {
            throw validation_error("monomial 'exps' needs one exponent per factor");
        }
        int deg = 0;
        for (const auto& e : ej) {
            const int k = e.get<int>();
            if (k < 0) throw validation_error("monomial exponents must be nonnegative");
            deg += k;
            m.exps.push_back(k);
        }
        if (deg > 4) throw validation_error("lambda polynomials are limited to degree 4");
        p.terms.push_back(std::move(m));
    }
    return p;
}

void check_vol_consistency(const ModelConfig& cfg) {
    // The declared sigma must factor the quadratic variation the curve
    // pipeline assumes: sigma sigma^T == a(y,z) at sampled states.
    const RateCurveParams& p = *cfg.rates;
    std::vector<Vector> samples{cfg.y0, Vector::Zero(p.d), Vector::Constant(p.d, 0.5),
                                Vector::Constant(p.d, 1.0)};
    for (const auto& y : samples) {
        if (std::holds_alternative<AffineSqrtVol>(cfg.vol) && y.minCoeff() < 0.0) continue;
        for (int z = 0; z < p.n; ++z) {
            const DriftDiffusion dd = assemble_drift_diffusion(y, z, p);
            Matrix s;
            if (const auto* mv = std::get_if<MatrixVol>(&cfg.vol)) {
                s = mv->sigma[static_cast<std::size_t>(z)];
            } else {
                const auto& av = std::get<AffineSqrtVol>(cfg.vol);
                s = av.sigma0[static_cast<std::size_t>(z)];
                for (int i = 0; i < p.d; ++i) {
                    s += av.sigma_i[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)] *
                         std::sqrt(std::max(y(i), 0.0));
                }
            }
            const Matrix diff = s * s.transpose() - dd.a;
            if (diff.cwiseAbs().maxCoeff() > 1e-8 * (1.0 + dd.a.cwiseAbs().maxCoeff())) {
                throw validation_error(
                    "vol is inconsistent with the declared quadratic variation at regime " +
                    std::to_string(z + 1));
            }
        }
    }
}

} // namespace

ModelConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config is not valid JSON: ") + e.what());
    }

    ModelConfig cfg;
    const std::string market = field(j, "market").get<std::string>();
    const int n = static_cast<int>(num(j, "n"));
    const int d = static_cast<int>(num(j, "d"));
    if (n < 1 || d < 1) throw validation_error("n and d must be positive");
    const GeneratorMatrix Q = validate_generator(parse_matrix(field(j, "q_matrix"), n, n, "q_matrix"));

    if (market == "energy") {
        cfg.market = MarketKind::energy;
        EnergyCurveParams p;
        p.n = n;
        p.d = d;
        p.r = num(j, "discount_r");
        p.Q = Q;
        const json& beta = field(j, "beta");
        if (!beta.is_array() || static_cast<int>(beta.size()) != d + 1) {
            throw validation_error("field 'beta' needs d+1 blocks (beta_0..beta_d)");
        }
        for (int i = 0; i <= d; ++i) {
            // block i: one beta_i(e_j) vector per regime, stored column-wise
            p.beta.push_back(
                parse_matrix(beta[static_cast<std::size_t>(i)], n, d, "beta block").transpose());
        }
        p.u0 = parse_matrix(field(j, "u0"), n, d, "u0").transpose();
        p.c0 = parse_vector(field(j, "c0"), n, "c0");
        p.validate();
        cfg.energy = std::move(p);
    } else if (market == "rates") {
        cfg.market = MarketKind::rates;
        RateCurveParams p;
        p.n = n;
        p.d = d;
        p.Q = Q;
        p.u0 = parse_vector(field(j, "u0"), d, "u0");
        p.c0 = parse_vector(field(j, "c0"), n, "c0");
        p.beta_lin = parse_matrix(field(j, "beta_lin"), d, d, "beta_lin").transpose();
        const json& alin = field(j, "A_lin");
        if (!alin.is_array() || static_cast<int>(alin.size()) != d) {
            throw validation_error("field 'A_lin' needs d matrices");
        }
        for (int i = 0; i < d; ++i) {
            p.A_lin.push_back(parse_matrix(alin[static_cast<std::size_t>(i)], d, d, "A_lin"));
        }
        p.beta0 = parse_matrix(field(j, "beta0"), n, d, "beta0").transpose();
        const json& a0 = field(j, "A0");
        if (!a0.is_array() || static_cast<int>(a0.size()) != n) {
            throw validation_error("field 'A0' needs one matrix per regime");
        }
        for (int z = 0; z < n; ++z) {
            p.A0.push_back(parse_matrix(a0[static_cast<std::size_t>(z)], d, d, "A0"));
        }
        if (auto it = j.find("lambda_terms"); it != j.end()) {
            for (const auto& tj : *it) {
                LambdaTerm term;
                term.b = parse_vector(field(tj, "b"), d, "lambda b");
                term.a = parse_matrix(field(tj, "a"), d, d, "lambda a");
                const json& lam = field(tj, "lambda");
                if (!lam.is_array() || static_cast<int>(lam.size()) != n) {
                    throw validation_error("lambda weights need one polynomial per regime");
                }
                for (const auto& pj : lam) term.lambda.push_back(parse_polynomial(pj, d));
                p.lambda_terms.push_back(std::move(term));
            }
        }
        p.validate();
        cfg.rates = std::move(p);
    } else {
        throw validation_error("market must be 'energy' or 'rates'");
    }

    cfg.vol = parse_vol(j, n, d);
    cfg.y0 = parse_vector(field(j, "y0"), d, "y0");
    const int z0 = static_cast<int>(num(j, "z0"));
    if (z0 < 1 || z0 > n) throw validation_error("z0 must be in 1..n");
    cfg.z0 = z0 - 1;

    const json& grid = field(j, "grid");
    cfg.grid.x_max = num(grid, "x_max");
    cfg.grid.x_step = num(grid, "x_step");
    cfg.grid.make(); // validates

    if (auto it = j.find("sim"); it != j.end()) {
        const json& sim = *it;
        if (sim.contains("dt")) cfg.sim.dt = num(sim, "dt");
        if (sim.contains("horizon")) cfg.sim.horizon = num(sim, "horizon");
        if (sim.contains("n_paths")) cfg.sim.n_paths = static_cast<int>(num(sim, "n_paths"));
        if (sim.contains("seed")) cfg.sim.seed = sim["seed"].get<std::uint64_t>();
    }
    if (!(cfg.sim.dt > 0.0) || !(cfg.sim.horizon > 0.0) || cfg.sim.n_paths < 1) {
        throw validation_error("sim requires dt > 0, horizon > 0, n_paths >= 1");
    }
    if (auto it = j.find("verify"); it != j.end()) {
        const json& ver = *it;
        if (ver.contains("n_probes")) cfg.verify.n_probes = static_cast<int>(num(ver, "n_probes"));
        if (ver.contains("probe_x_max")) cfg.verify.probe_x_max = num(ver, "probe_x_max");
        if (ver.contains("checkpoints")) {
            cfg.verify.checkpoints = ver["checkpoints"].get<std::vector<double>>();
        }
        if (ver.contains("futures_T1")) cfg.verify.futures_T1 = num(ver, "futures_T1");
        if (ver.contains("futures_T2")) cfg.verify.futures_T2 = num(ver, "futures_T2");
        if (ver.contains("bond_T")) cfg.verify.bond_T = num(ver, "bond_T");
        if (ver.contains("z_max")) cfg.verify.z_max = num(ver, "z_max");
    }
    cfg.verify.probe_x_max = std::min(cfg.verify.probe_x_max, cfg.grid.x_max);

    if (cfg.market == MarketKind::rates) check_vol_consistency(cfg);
    cfg.canonical = j.dump();
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_hash(const ModelConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : cfg.canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

DiffusionSpec make_diffusion_spec(const ModelConfig& cfg) {
    DiffusionSpec spec;
    spec.vol = cfg.vol;
    spec.y0 = cfg.y0;
    spec.z0 = cfg.z0;
    if (cfg.market == MarketKind::energy) {
        const EnergyCurveParams p = *cfg.energy;
        spec.drift = [p](const Vector& y, int z) {
            Vector b = p.beta[0].col(z);
            for (int i = 1; i <= p.d; ++i) b += p.beta[static_cast<std::size_t>(i)].col(z) * y(i - 1);
            return b;
        };
    } else {
        const RateCurveParams p = *cfg.rates;
        spec.drift = [p](const Vector& y, int z) {
            Vector b = p.beta0.col(z) + p.beta_lin * y;
            for (const auto& term : p.lambda_terms) {
                b += term.lambda[static_cast<std::size_t>(z)].eval(y) * term.b;
            }
            return b;
        };
    }
    return spec;
}

ForwardCurveModel build_model(const ModelConfig& cfg) {
    const std::vector<double> grid = cfg.grid.make();
    if (cfg.market == MarketKind::energy) {
        return ForwardCurveModel::from_energy(*cfg.energy, solve_energy_curves(*cfg.energy, grid));
    }
    return ForwardCurveModel::from_rates(*cfg.rates, solve_rate_curves(*cfg.rates, grid));
}

int config_regimes(const ModelConfig& cfg) {
    return cfg.market == MarketKind::energy ? cfg.energy->n : cfg.rates->n;
}

int config_factors(const ModelConfig& cfg) {
    return cfg.market == MarketKind::energy ? cfg.energy->d : cfg.rates->d;
}

const GeneratorMatrix& config_generator(const ModelConfig& cfg) {
    return cfg.market == MarketKind::energy ? cfg.energy->generator() : cfg.rates->generator();
}

} // namespace rcurve

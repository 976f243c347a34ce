#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcurve/config.hpp"
#include "rcurve/errors.hpp"
#include "rcurve/noarb.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rcurve;

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

struct RunContext {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    std::optional<int> paths_override;

    ModelConfig load() const {
        ModelConfig cfg = load_config(config_path);
        if (seed_override) cfg.sim.seed = *seed_override;
        if (paths_override) cfg.sim.n_paths = *paths_override;
        return cfg;
    }
};

void write_manifest(const RunContext& ctx, const ModelConfig& cfg, const std::string& command,
                    const std::vector<fs::path>& outputs, const json& achieved) {
    json m;
    m["command"] = command;
    m["config_file"] = ctx.config_path;
    m["config_hash"] = config_hash(cfg);
    m["seed"] = cfg.sim.seed;
    m["tool_version"] = kToolVersion;
    m["created"] = iso_now();
    m["tolerances"] = achieved;
    m["outputs"] = json::array();
    for (const auto& p : outputs) {
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(fnv64_file(p)));
        m["outputs"].push_back({{"file", p.filename().string()}, {"fnv64", hash}});
    }
    std::ofstream out(fs::path(ctx.out_dir) / (command + "_manifest.json"));
    out << m.dump(2) << "\n";
}

fs::path write_curves_csv(const RunContext& ctx, const ModelConfig& cfg,
                          const ForwardCurveModel& model) {
    const fs::path path = fs::path(ctx.out_dir) / "curves.csv";
    std::ofstream out(path);
    const int d = config_factors(cfg);
    out << "x,regime";
    for (int i = 1; i <= d; ++i) out << ",u_" << i;
    out << ",c\n";
    const std::vector<double> grid = cfg.grid.make();
    for (int z = 0; z < config_regimes(cfg); ++z) {
        for (double x : grid) {
            const auto [c, u] = model.curve_at(x, z);
            out << fmt(x) << ',' << (z + 1);
            for (int i = 0; i < d; ++i) out << ',' << fmt(u(i));
            out << ',' << fmt(c) << '\n';
        }
    }
    return path;
}

int cmd_build(const RunContext& ctx) {
    const ModelConfig cfg = ctx.load();
    const ForwardCurveModel model = build_model(cfg);
    fs::create_directories(ctx.out_dir);
    const fs::path curves = write_curves_csv(ctx, cfg, model);
    json achieved;
    achieved["grid_step"] = cfg.grid.x_step;
    if (cfg.market == MarketKind::rates) {
        double wmin = std::numeric_limits<double>::infinity();
        for (const auto& w : model.rate_curves().wtilde.values()) wmin = std::min(wmin, w.minCoeff());
        achieved["wtilde_min"] = wmin;
    }
    write_manifest(ctx, cfg, "build", {curves}, achieved);
    return 0;
}

int cmd_simulate(const RunContext& ctx) {
    const ModelConfig cfg = ctx.load();
    const DiffusionSpec spec = make_diffusion_spec(cfg);
    fs::create_directories(ctx.out_dir);
    const fs::path path = fs::path(ctx.out_dir) / "paths.csv";
    {
        std::ofstream out(path);
        out << "path_id,t,z";
        for (int i = 1; i <= config_factors(cfg); ++i) out << ",y_" << i;
        out << '\n';
        for_each_path(spec, config_generator(cfg), cfg.sim.dt, cfg.sim.horizon, cfg.sim.n_paths,
                      cfg.sim.seed, [&](int id, const PathSample& p) {
                          for (std::size_t k = 0; k < p.times.size(); ++k) {
                              out << id << ',' << fmt(p.times[k]) << ',' << (p.z[k] + 1);
                              for (int i = 0; i < p.y[k].size(); ++i) out << ',' << fmt(p.y[k](i));
                              out << '\n';
                          }
                      });
    }
    write_manifest(ctx, cfg, "simulate", {path},
                   {{"dt", cfg.sim.dt}, {"horizon", cfg.sim.horizon}});
    return 0;
}

int cmd_verify(const RunContext& ctx, double perturb_r, double perturb_c) {
    ModelConfig cfg = ctx.load();
    ForwardCurveModel model = build_model(cfg);
    const int n = config_regimes(cfg);
    const int d = config_factors(cfg);
    const bool sqrt_vol = std::holds_alternative<AffineSqrtVol>(cfg.vol);

    const auto probes = make_probes(d, n, cfg.verify.n_probes, cfg.verify.probe_x_max,
                                    cfg.sim.seed ^ 0x9e3779b97f4a7c15ULL, sqrt_vol);
    ResidualReport res;
    double res_tol;
    if (cfg.market == MarketKind::energy) {
        std::optional<double> r_override;
        if (perturb_r != 0.0) r_override = cfg.energy->r + perturb_r;
        res = energy_drift_residual(model, probes, r_override);
        res_tol = cfg.verify.residual_tol_energy;
    } else {
        std::optional<Vector> shift;
        if (perturb_c != 0.0) {
            Vector v = Vector::Zero(n);
            v(n - 1) = perturb_c;
            shift = v;
        }
        res = rate_drift_residual(model, probes, shift);
        res_tol = cfg.verify.residual_tol_rates;
    }

    // The martingale test sees the same perturbation through the model itself:
    // a shifted discount rate (energy) or a shifted level curve (rates).
    if (cfg.market == MarketKind::energy && perturb_r != 0.0) {
        EnergyCurveParams p = *cfg.energy;
        p.r += perturb_r;
        model = ForwardCurveModel::from_energy(p, model.energy_curves());
    } else if (cfg.market == MarketKind::rates && perturb_c != 0.0) {
        RateCurveGrid curves = model.rate_curves();
        for (auto& c : curves.c.values()) c(n - 1) += perturb_c;
        model = ForwardCurveModel::from_rates(*cfg.rates, curves);
    }

    std::vector<Contract> contracts;
    if (cfg.market == MarketKind::energy) {
        contracts.push_back(FuturesContract{cfg.verify.futures_T1, cfg.verify.futures_T2});
    } else {
        contracts.push_back(BondContract{cfg.verify.bond_T});
    }
    const MartingaleReport mc =
        martingale_test(model, make_diffusion_spec(cfg), contracts, cfg.verify.checkpoints,
                        cfg.sim.n_paths, cfg.sim.dt, cfg.sim.seed);

    const bool res_ok = res.sup_residual <= res_tol;
    const bool mc_ok = mc.max_abs_z() <= cfg.verify.z_max;

    json report;
    report["residuals"] = {{"sup_residual", res.sup_residual},
                           {"tolerance", res_tol},
                           {"pass", res_ok},
                           {"n_probes", static_cast<int>(res.samples.size())}};
    json worst = json::array();
    std::vector<const ResidualSample*> order;
    for (const auto& s : res.samples) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        return std::abs(a->residual) > std::abs(b->residual);
    });
    for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i) {
        worst.push_back({{"x", order[i]->x},
                         {"regime", order[i]->z + 1},
                         {"lhs", order[i]->lhs},
                         {"rhs", order[i]->rhs},
                         {"residual", order[i]->residual}});
    }
    report["residuals"]["worst"] = worst;
    json cps = json::array();
    for (const auto& cp : mc.checkpoints) {
        cps.push_back({{"t", cp.t},
                       {"contract", cp.contract},
                       {"mean_discounted", cp.mean_discounted},
                       {"std_error", cp.std_error},
                       {"reference", cp.reference},
                       {"z_stat", cp.z_stat}});
    }
    report["martingale"] = {{"checkpoints", cps},
                            {"n_paths", mc.n_paths},
                            {"dt", mc.dt},
                            {"seed", mc.seed},
                            {"max_abs_z", mc.max_abs_z()},
                            {"z_max", cfg.verify.z_max},
                            {"pass", mc_ok}};
    report["pass"] = res_ok && mc_ok;

    fs::create_directories(ctx.out_dir);
    const fs::path rpath = fs::path(ctx.out_dir) / "verify_report.json";
    {
        std::ofstream out(rpath);
        out << report.dump(2) << "\n";
    }
    write_manifest(ctx, cfg, "verify", {rpath},
                   {{"sup_residual", res.sup_residual}, {"max_abs_z", mc.max_abs_z()}});
    if (!(res_ok && mc_ok)) {
        std::cerr << "verification failed: sup_residual = " << res.sup_residual
                  << " (tol " << res_tol << "), max |z| = " << mc.max_abs_z() << " (max "
                  << cfg.verify.z_max << ")\n";
        return 4;
    }
    return 0;
}

int cmd_surface(const RunContext& ctx, std::vector<double> times) {
    const ModelConfig cfg = ctx.load();
    if (times.empty()) times = {0.0};
    std::sort(times.begin(), times.end());
    if (times.front() < 0.0) throw validation_error("surface times must be nonnegative");
    const ForwardCurveModel model = build_model(cfg);
    const double horizon = std::max(times.back(), cfg.sim.dt);
    const DiffusionSpec spec = make_diffusion_spec(cfg);
    const auto paths = simulate_paths(spec, config_generator(cfg), cfg.sim.dt, horizon, 1,
                                      cfg.sim.seed);
    const PathSample& scenario = paths.front();

    fs::create_directories(ctx.out_dir);
    const fs::path path = fs::path(ctx.out_dir) / "surface.csv";
    {
        std::ofstream out(path);
        out << "t,x,f\n";
        const std::vector<double> grid = cfg.grid.make();
        for (double t : times) {
            const auto k = static_cast<std::size_t>(std::llround(t / cfg.sim.dt));
            if (k >= scenario.times.size()) throw validation_error("surface time beyond horizon");
            const Vector& y = scenario.y[k];
            const int z = scenario.z[k];
            for (double x : grid) {
                out << fmt(t) << ',' << fmt(x) << ',' << fmt(model.forward_rate(x, y, z)) << '\n';
            }
        }
    }
    write_manifest(ctx, cfg, "surface", {path}, {{"times", times}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regime-switching affine forward-curve models"};
    app.require_subcommand(1);

    RunContext ctx;
    double perturb_r = 0.0;
    double perturb_c = 0.0;
    std::vector<double> times;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", ctx.config_path, "model config JSON")->required();
        sub->add_option("--out", ctx.out_dir, "output directory");
        sub->add_option("--seed", ctx.seed_override, "override the config seed");
        sub->add_option("--paths", ctx.paths_override, "override the config path count");
    };

    CLI::App* build = app.add_subcommand("build", "solve the curve system and export curves");
    add_common(build);
    CLI::App* simulate = app.add_subcommand("simulate", "simulate factor/regime paths");
    add_common(simulate);
    CLI::App* verify =
        app.add_subcommand("verify", "check drift-condition residuals and martingale statistics");
    add_common(verify);
    verify->add_option("--perturb-r", perturb_r, "shift the discount rate in the checks (energy)");
    verify->add_option("--perturb-c", perturb_c,
                       "shift the last regime's level curve in the checks (rates)");
    CLI::App* surface = app.add_subcommand("surface", "export forward-curve slices along a path");
    add_common(surface);
    surface->add_option("--times", times, "comma-separated observation times")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build(ctx);
        if (simulate->parsed()) return cmd_simulate(ctx);
        if (verify->parsed()) return cmd_verify(ctx, perturb_r, perturb_c);
        return cmd_surface(ctx, times);
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

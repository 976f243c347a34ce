#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = RCURVE_CLI_PATH;
const fs::path config_dir = RCURVE_CONFIG_DIR;

int run(const std::string& args) {
    const int status = std::system((cli + " " + args).c_str());
#if defined(_WIN32)
    return status;
#else
    return (status >= 0 && (status & 0x7f) == 0) ? ((status >> 8) & 0xff) : -1;
#endif
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("rcurve_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// tiny single-regime futures market with a coarse grid, for fast runs
std::string small_energy_config(const std::string& q_row = "[0.0]") {
    return std::string(R"({
  "market": "energy",
  "n": 1,
  "d": 1,
  "q_matrix": [)") +
           q_row + R"(],
  "discount_r": 0.05,
  "beta": [[[0.1]], [[-0.5]]],
  "u0": [[0.8]],
  "c0": [1.0],
  "vol": {"type": "matrix", "sigma": [[[0.0]]]},
  "y0": [0.2],
  "z0": 1,
  "grid": {"x_max": 2.0, "x_step": 0.01},
  "sim": {"dt": 0.5, "horizon": 1.0, "n_paths": 2, "seed": 7}
})";
}

std::string blowup_rates_config() {
    return R"({
  "market": "rates",
  "n": 1,
  "d": 1,
  "q_matrix": [[0.0]],
  "u0": [1.0],
  "c0": [0.03],
  "beta_lin": [[0.5]],
  "A_lin": [[[-8.0]]],
  "beta0": [[0.0]],
  "A0": [[[0.0]]],
  "lambda_terms": [],
  "vol": {"type": "matrix", "sigma": [[[0.0]]]},
  "y0": [0.2],
  "z0": 1,
  "grid": {"x_max": 10.0, "x_step": 0.001},
  "sim": {"dt": 0.01, "horizon": 1.0, "n_paths": 2, "seed": 7}
})";
}

} // namespace

TEST_CASE("build exports the curve table") {
    const fs::path dir = fresh_dir("build");
    const fs::path cfg = config_dir / "energy_two_regime.json";
    REQUIRE(run("build --config " + cfg.string() + " --out " + dir.string()) == 0);
    const auto rows = lines_of(dir / "curves.csv");
    REQUIRE(!rows.empty());
    CHECK(rows[0] == "x,regime,u_1,u_2,c");
    CHECK(rows.size() == 1 + 2 * 10001); // header + both regimes over the grid
    CHECK(rows[1].rfind("0,1,", 0) == 0);
    CHECK(fs::exists(dir / "build_manifest.json"));
    const std::string manifest = slurp(dir / "build_manifest.json");
    CHECK(manifest.find("\"command\": \"build\"") != std::string::npos);
    CHECK(manifest.find("curves.csv") != std::string::npos);
}

TEST_CASE("invalid generator rejected with a diagnostic") {
    const fs::path dir = fresh_dir("badq");
    const fs::path cfg = dir / "bad.json";
    write_file(cfg, small_energy_config("[0.5]")); // row does not sum to zero
    const fs::path err = dir / "err.txt";
    const int rc = run("build --config " + cfg.string() + " --out " + dir.string() + " 2> " +
                       err.string());
    CHECK(rc == 2);
    CHECK(slurp(err).find("row 1") != std::string::npos);
}

TEST_CASE("numerical blowup exits with its own code") {
    const fs::path dir = fresh_dir("blowup");
    const fs::path cfg = dir / "blowup.json";
    write_file(cfg, blowup_rates_config());
    CHECK(run("build --config " + cfg.string() + " --out " + dir.string() + " 2> /dev/null") == 3);
}

TEST_CASE("simulate writes one row per path and step") {
    const fs::path dir = fresh_dir("sim");
    const fs::path cfg = dir / "model.json";
    write_file(cfg, small_energy_config());
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + dir.string()) == 0);
    const auto rows = lines_of(dir / "paths.csv");
    REQUIRE(rows.size() == 1 + 2 * 3); // header + 2 paths x {0, 0.5, 1}
    CHECK(rows[0] == "path_id,t,z,y_1");

    // zero volatility, single regime: both paths identical and deterministic
    CHECK(rows[1].substr(rows[1].find(',')) == rows[4].substr(rows[4].find(',')));

    // same seed, byte-identical output
    const fs::path dir2 = fresh_dir("sim2");
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + dir2.string()) == 0);
    CHECK(slurp(dir / "paths.csv") == slurp(dir2 / "paths.csv"));

    // different seed changes the regime draw stream but keeps the layout
    const fs::path dir3 = fresh_dir("sim3");
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + dir3.string() + " --seed 8") ==
            0);
    CHECK(lines_of(dir3 / "paths.csv").size() == rows.size());
}

TEST_CASE("verify passes on a consistent market and fails on a perturbed one") {
    const fs::path dir = fresh_dir("verify");
    const fs::path cfg = config_dir / "rates_two_regime.json";
    REQUIRE(run("verify --config " + cfg.string() + " --out " + dir.string() + " --paths 200") ==
            0);
    const std::string report = slurp(dir / "verify_report.json");
    CHECK(report.find("\"pass\": true") != std::string::npos);
    CHECK(report.find("bond[3]") != std::string::npos);

    const fs::path dirp = fresh_dir("verifyp");
    CHECK(run("verify --config " + cfg.string() + " --out " + dirp.string() +
              " --paths 200 --perturb-c 0.05 2> /dev/null") == 4);
    CHECK(slurp(dirp / "verify_report.json").find("\"pass\": false") != std::string::npos);
}

TEST_CASE("verify flags a discount-rate perturbation on the futures market") {
    const fs::path dir = fresh_dir("verifye");
    const fs::path cfg = config_dir / "energy_two_regime.json";
    REQUIRE(run("verify --config " + cfg.string() + " --out " + dir.string() + " --paths 200") ==
            0);
    const fs::path dirp = fresh_dir("verifyep");
    CHECK(run("verify --config " + cfg.string() + " --out " + dirp.string() +
              " --paths 200 --perturb-r 0.05 2> /dev/null") == 4);
}

TEST_CASE("surface slices match the curve read-out at time zero") {
    const fs::path dir = fresh_dir("surface");
    const fs::path cfg = dir / "model.json";
    write_file(cfg, small_energy_config());
    REQUIRE(run("surface --config " + cfg.string() + " --out " + dir.string() + " --times 0,0.5") ==
            0);
    const auto rows = lines_of(dir / "surface.csv");
    REQUIRE(rows.size() == 1 + 2 * 201); // header + two slices over the grid
    CHECK(rows[0] == "t,x,f");
    // first slice, x = 0: f = c0 + u0 * y0 = 1 + 0.8 * 0.2
    std::istringstream first(rows[1]);
    std::string t, x, f;
    std::getline(first, t, ',');
    std::getline(first, x, ',');
    std::getline(first, f, ',');
    CHECK(std::stod(t) == 0.0);
    CHECK(std::stod(x) == 0.0);
    CHECK(std::stod(f) == doctest::Approx(1.16).epsilon(1e-12));
}

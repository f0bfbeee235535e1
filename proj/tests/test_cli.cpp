#include "doctest.h"

#include "hsricc/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hsricc_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

fs::path write_config(const TempDir& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir.path / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::initializer_list<std::string> args) {
    return hsricc::cli::run(std::vector<std::string>(args));
}

}  // namespace

TEST_CASE("solve: scalar demo config") {
    TempDir dir;
    const auto cfg = write_config(dir, "run.json", R"({
        "seed": 3,
        "problem": {"type": "scalar", "a": 1.0, "g": 1.0, "f": 3.0},
        "solver": {"lambda_schedule": {"start": 1.0, "ratio": 0.5, "stages": 40},
                   "residual_tol": 1e-10}
    })");
    const auto out = (dir.path / "out").string();
    CHECK(run_cli({"solve", "--config", cfg.string(), "--out", out}) == hsricc::cli::kOk);
    const std::string report = slurp(dir.path / "out" / "report.json");
    CHECK(report.find("\"route\": \"coercive\"") != std::string::npos);
    CHECK(report.find("\"residual_hs\"") != std::string::npos);
    // p = 1 for (a, g, f) = (1, 1, 3)
    CHECK(report.find("1.0") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "history.csv"));
}

TEST_CASE("solve: malformed config exits with the config error code") {
    TempDir dir;
    const auto cfg = write_config(dir, "bad.json", "{ this is not json");
    CHECK(run_cli({"solve", "--config", cfg.string(), "--out",
                   (dir.path / "o").string()}) == hsricc::cli::kConfigError);
    const auto missing = (dir.path / "missing.json").string();
    CHECK(run_cli({"solve", "--config", missing, "--out", (dir.path / "o2").string()}) ==
          hsricc::cli::kConfigError);
    const auto cfg2 = write_config(dir, "badtype.json", R"({"problem": {"type": "nope"}})");
    CHECK(run_cli({"solve", "--config", cfg2.string(), "--out",
                   (dir.path / "o3").string()}) == hsricc::cli::kConfigError);
}

TEST_CASE("solve: hypotheses-not-met maps to the solver-failure code") {
    TempDir dir;
    // rotation A (sym part zero) with Gamma = 0: neither route applies
    const auto cfg = write_config(dir, "run.json", R"({
        "problem": {"type": "matrices",
                    "rho_sq": [1.0, 2.0],
                    "a_mat": [[0.0, 1.0], [-1.0, 0.0]],
                    "gamma_mat": [[0.0, 0.0], [0.0, 0.0]],
                    "f_mat": [[1.0, 0.0], [0.0, 1.0]]}
    })");
    CHECK(run_cli({"solve", "--config", cfg.string(), "--out",
                   (dir.path / "o").string()}) == hsricc::cli::kSolverFailure);
}

TEST_CASE("verify: scalar plant passes and writes the gain reports") {
    TempDir dir;
    const auto cfg = write_config(dir, "plant.json", R"({
        "seed": 11,
        "plant": {"type": "scalar", "a": 1.0, "b1": 1.0, "b2": 1.0, "c1": 1.0,
                  "gamma_perf": 2.0},
        "solver": {"lambda_schedule": {"start": 1.0, "ratio": 0.5, "stages": 50},
                   "residual_tol": 1e-9},
        "simulation": {"disturbances": 12}
    })");
    const auto out = (dir.path / "out").string();
    CHECK(run_cli({"verify", "--config", cfg.string(), "--out", out}) == hsricc::cli::kOk);
    CHECK(fs::exists(dir.path / "out" / "gain.csv"));
    CHECK(fs::exists(dir.path / "out" / "trajectory.csv"));
    const std::string gain = slurp(dir.path / "out" / "gain.csv");
    CHECK(gain.find("label,ratio,energy_w,energy_out") != std::string::npos);
}

TEST_CASE("determinism: identical config and seed give identical bytes") {
    TempDir dir;
    const auto cfg = write_config(dir, "plant.json", R"({
        "seed": 5,
        "plant": {"type": "scalar", "a": 1.0, "b1": 1.0, "b2": 1.0, "c1": 0.5,
                  "gamma_perf": 3.0},
        "solver": {"lambda_schedule": {"start": 1.0, "ratio": 0.5, "stages": 40},
                   "residual_tol": 1e-8},
        "simulation": {"disturbances": 8}
    })");
    const auto out1 = (dir.path / "a").string();
    const auto out2 = (dir.path / "b").string();
    REQUIRE(run_cli({"verify", "--config", cfg.string(), "--out", out1}) == hsricc::cli::kOk);
    REQUIRE(run_cli({"verify", "--config", cfg.string(), "--out", out2}) == hsricc::cli::kOk);
    CHECK(slurp(dir.path / "a" / "report.json") == slurp(dir.path / "b" / "report.json"));
    CHECK(slurp(dir.path / "a" / "gain.csv") == slurp(dir.path / "b" / "gain.csv"));
    CHECK(slurp(dir.path / "a" / "history.csv") == slurp(dir.path / "b" / "history.csv"));

    // a different seed shifts the noise disturbances
    const auto out3 = (dir.path / "c").string();
    REQUIRE(run_cli({"verify", "--config", cfg.string(), "--out", out3, "--seed", "99"}) ==
            hsricc::cli::kOk);
    CHECK(slurp(dir.path / "a" / "gain.csv") != slurp(dir.path / "c" / "gain.csv"));
}

TEST_CASE("hardy-demo at reduced modes") {
    TempDir dir;
    const auto out = (dir.path / "out").string();
    CHECK(run_cli({"hardy-demo", "--out", out, "--modes", "8"}) == hsricc::cli::kOk);
    const std::string report = slurp(dir.path / "out" / "report.json");
    CHECK(report.find("\"hardy_constant\": 0.25") != std::string::npos);
    CHECK(report.find("\"gamma_psd_direct\": true") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "gain.csv"));
}

TEST_CASE("study: lambda table and hardy sweep") {
    TempDir dir;
    const auto cfg = write_config(dir, "study.json", R"({
        "seed": 1,
        "problem": {"type": "scalar", "a": 1.0, "g": 0.0, "f": 2.0},
        "solver": {"lambda_schedule": {"start": 1.0, "ratio": 0.5, "stages": 12},
                   "residual_tol": 1e-12},
        "study": {"kind": "lambda"}
    })");
    const auto out = (dir.path / "out").string();
    CHECK(run_cli({"study", "--config", cfg.string(), "--out", out}) == hsricc::cli::kOk);
    const std::string csv = slurp(dir.path / "out" / "study_lambda.csv");
    CHECK(csv.find("stage,kind,value") != std::string::npos);

    const auto cfg2 = write_config(dir, "sweep.json", R"({
        "seed": 1,
        "study": {"kind": "hardy-sweep", "modes": 6,
                  "lambda_hardy_grid": [0.0, 0.1, 0.2], "gamma_perf": 1e6}
    })");
    const auto out2 = (dir.path / "out2").string();
    CHECK(run_cli({"study", "--config", cfg2.string(), "--out", out2}) == hsricc::cli::kOk);
    const std::string sweep = slurp(dir.path / "out2" / "study_hardy_sweep.csv");
    CHECK(sweep.find("lambda_hardy,omega") != std::string::npos);
    // one line per grid point plus comment and header
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 5);
}

TEST_CASE("outputs embed the config hash and seed") {
    TempDir dir;
    const auto cfg = write_config(dir, "run.json", R"({
        "seed": 42,
        "problem": {"type": "scalar", "a": 1.0, "g": 1.0, "f": 3.0}
    })");
    const auto out = (dir.path / "out").string();
    REQUIRE(run_cli({"solve", "--config", cfg.string(), "--out", out}) == hsricc::cli::kOk);
    const std::string report = slurp(dir.path / "out" / "report.json");
    CHECK(report.find("\"config_hash\"") != std::string::npos);
    CHECK(report.find("\"seed\": 42") != std::string::npos);
    const std::string hist = slurp(dir.path / "out" / "history.csv");
    CHECK(hist.rfind("# hsricc", 0) == 0);
    CHECK(hist.find("seed=42") != std::string::npos);
    CHECK(hist.find("bounds=") != std::string::npos);
}

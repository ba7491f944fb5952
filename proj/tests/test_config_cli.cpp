#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgnudge/config.hpp"

using namespace pgnudge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal_config() {
    return json::parse(R"({
      "domain": {"Lx": 1.0, "Ly": 1.0, "H": 1.0, "nx": 8, "ny": 8, "nz": 6},
      "params": {"A_h": 1.0, "A_v": 1.0, "K_h": 0.1, "K_v": 0.1, "alpha": 0.1,
                 "f0": 1.0, "beta": 0.5, "mu": 5.0},
      "forcing": {"Tstar": {"amplitude": 0.2, "kx": 1, "ky": 1}},
      "stepper": {"dt": 0.02},
      "interpolant": {"kind": "modal", "h": 0.4},
      "assimilation": {"spin_up_time": 0.2, "assimilation_time": 0.4},
      "init": {"seed": 3, "amplitude": 0.3, "max_mode": 2},
      "output": {"snapshot_stride": 50, "record_stride": 5}
    })");
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("pgnudge_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const TempDir& dir, const json& j, const std::string& name) {
    fs::path p = dir.path / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    std::string cmd = std::string(PGNUDGE_CLI_PATH) + " " + args + " > " + log.string() +
                      " 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parsing fills defaults and resolves fields") {
    RunConfig cfg = parse_config(minimal_config());
    CHECK(cfg.twin.domain.nx == 8);
    CHECK(cfg.twin.params.mu == 5.0);
    CHECK(cfg.twin.params.h_depth == cfg.twin.domain.h_depth);
    CHECK(cfg.twin.stepper.scheme == TimeScheme::imex_euler);
    CHECK(cfg.twin.forcing.qstar.data().size() == cfg.twin.domain.nodes3d());
    CHECK(cfg.twin.forcing.tstar.at(0, 0) == doctest::Approx(0.2));
}

TEST_CASE("validation failures carry field paths and aggregate") {
    json j = minimal_config();
    j["params"]["K_v"] = -1.0;
    j["assimilation"]["assimilation_time"] = -2.0;
    try {
        parse_config(j);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        REQUIRE(e.messages.size() >= 2);
        bool has_kv = false, has_time = false;
        for (const std::string& m : e.messages) {
            if (m.find("params.K_v") != std::string::npos) has_kv = true;
            if (m.find("assimilation_time") != std::string::npos) has_time = true;
        }
        CHECK(has_kv);
        CHECK(has_time);
    }
}

TEST_CASE("type errors are reported with paths") {
    json j = minimal_config();
    j["stepper"]["dt"] = "fast";
    CHECK_THROWS_AS(parse_config(j), config_error);
    j = minimal_config();
    j["params"]["mu"] = "sometimes";
    CHECK_THROWS_AS(parse_config(j), config_error);
}

TEST_CASE("auto relaxation strength resolves to the heuristic") {
    json j = minimal_config();
    j["params"]["mu"] = "auto";
    j["stepper"]["dt"] = 0.01;
    RunConfig cfg = parse_config(j);
    CHECK(cfg.mu_auto);
    CHECK(cfg.twin.params.mu ==
          doctest::Approx(mu_heuristic(cfg.twin.params, cfg.twin.forcing)));
    CHECK(cfg.twin.params.mu > 20.0);
}

TEST_CASE("config echo round-trips") {
    json j = minimal_config();
    j["params"]["mu"] = "auto";
    j["stepper"]["dt"] = 0.01;
    RunConfig cfg = parse_config(j);
    nlohmann::ordered_json echo = config_echo(cfg);
    RunConfig cfg2 = parse_config(json::parse(echo.dump()));
    CHECK(config_echo(cfg2).dump() == echo.dump());
    CHECK(cfg2.twin.params.mu == cfg.twin.params.mu);
    CHECK(cfg2.twin.seed == cfg.twin.seed);
}

TEST_CASE("cli reports config errors with exit code 2") {
    TempDir dir("cli_bad");
    json j = minimal_config();
    j["params"]["K_v"] = -3.0;
    fs::path cfg = write_config(dir, j, "bad.json");
    fs::path log = dir.path / "log.txt";
    int rc = run_cli("simulate --config " + cfg.string() + " --out " +
                         (dir.path / "out").string(),
                     log);
    CHECK(rc == 2);
    CHECK(slurp(log).find("params.K_v") != std::string::npos);

    rc = run_cli("constants --config " + (dir.path / "missing.json").string(), log);
    CHECK(rc == 2);
}

TEST_CASE("cli constants prints a json document") {
    TempDir dir("cli_constants");
    fs::path cfg = write_config(dir, minimal_config(), "cfg.json");
    fs::path log = dir.path / "out.json";
    int rc = run_cli("constants --config " + cfg.string(), log);
    REQUIRE(rc == 0);
    json out = json::parse(slurp(log));
    CHECK(out.contains("K_tilde"));
    CHECK(out.contains("mu_min"));
    CHECK(out.contains("feasible"));
    CHECK(out["inputs"]["mu"] == 5.0);
}

TEST_CASE("cli constants sweep tabulates the feasibility flip") {
    TempDir dir("cli_sweep");
    json j = minimal_config();
    j["params"]["mu"] = 16.0;
    fs::path cfg = write_config(dir, j, "cfg.json");
    fs::path log = dir.path / "sweep.json";
    int rc = run_cli("constants --config " + cfg.string() +
                         " --sweep interpolant.h=0.12,0.2,0.3,0.4",
                     log);
    REQUIRE(rc == 0);
    json out = json::parse(slurp(log));
    REQUIRE(out.is_array());
    CHECK(out.size() == 4);
    for (const auto& entry : out) CHECK(entry["constants"].contains("mu_small_enough"));
}

TEST_CASE("cli simulate writes deterministic series") {
    TempDir dir("cli_sim");
    json j = minimal_config();
    j["params"]["mu"] = 0.0;
    j["forcing"]["Tstar"]["amplitude"] = 0.0;
    j["assimilation"]["spin_up_time"] = 0.0;
    j["assimilation"]["assimilation_time"] = 0.3;
    fs::path cfg = write_config(dir, j, "cfg.json");
    fs::path log = dir.path / "log.txt";
    fs::path out1 = dir.path / "run1";
    fs::path out2 = dir.path / "run2";
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + out1.string(),
                    log) == 0);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + out2.string(),
                    log) == 0);
    CHECK(fs::exists(out1 / "series.csv"));
    CHECK(fs::exists(out1 / "report.json"));
    CHECK(slurp(out1 / "series.csv") == slurp(out2 / "series.csv"));
    CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));

    SUBCASE("refuses to reuse a non-empty directory without --force") {
        int rc = run_cli("simulate --config " + cfg.string() + " --out " + out1.string(),
                         log);
        CHECK(rc == 2);
        rc = run_cli("simulate --config " + cfg.string() + " --out " + out1.string() +
                         " --force",
                     log);
        CHECK(rc == 0);
    }
}

TEST_CASE("cli spectrum exports the basis and measured constant") {
    TempDir dir("cli_spec");
    fs::path cfg = write_config(dir, minimal_config(), "cfg.json");
    fs::path log = dir.path / "log.txt";
    fs::path out = dir.path / "out";
    REQUIRE(run_cli("spectrum --config " + cfg.string() + " --out " + out.string(),
                    log) == 0);
    std::string basis = slurp(out / "basis.csv");
    CHECK(basis.rfind("j,lambda,kx,ky,mz\n", 0) == 0);
    json c0 = json::parse(slurp(out / "c0.json"));
    CHECK(c0["m_h"].get<int>() >= 1);
    CHECK(c0["measured_c0"].get<double>() > 0.0);
    CHECK(c0["lambda1"].get<double>() > 0.0);
}

TEST_CASE("cli seed override changes the trajectory") {
    TempDir dir("cli_seed");
    json j = minimal_config();
    j["params"]["mu"] = 0.0;
    j["assimilation"]["spin_up_time"] = 0.0;
    j["assimilation"]["assimilation_time"] = 0.2;
    fs::path cfg = write_config(dir, j, "cfg.json");
    fs::path log = dir.path / "log.txt";
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " +
                        (dir.path / "a").string(),
                    log) == 0);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 99 --out " +
                        (dir.path / "b").string(),
                    log) == 0);
    CHECK(slurp(dir.path / "a" / "series.csv") != slurp(dir.path / "b" / "series.csv"));
}

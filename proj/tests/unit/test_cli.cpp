#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hypertree/cli.hpp"
#include "hypertree/io.hpp"

using namespace hypertree;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(const std::string& command, const std::string& config, std::vector<std::string> extra = {}) {
    const fs::path dir = fs::temp_directory_path() / "hypertree_unit_cli";
    fs::create_directories(dir);
    const fs::path cfg = dir / (command + ".json");
    std::ofstream(cfg) << config;
    std::vector<std::string> args{"hypertree", command, "--config", cfg.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("tree command") {
    const Run r = run_cli("tree", R"J({"tree": "((1 2) (3 4))", "masses": [1, 1, 1, 1]})J");
    CHECK(r.code == 0);
    CHECK(r.out.find("mu_{1,2} = 0.5") != std::string::npos);
    CHECK(r.out.find("mu_{3,4} = 0.5") != std::string::npos);
    CHECK(r.out.find("mu_{12,34} = 1 ") != std::string::npos);
    CHECK(r.out.find("config: ") == 0);

    const Run two = run_cli("tree", R"J({"tree": "(1 2)", "masses": [1, 1]})J");
    CHECK(two.out.find("mu_{1,2} = 0.5") != std::string::npos);

    const Run bad = run_cli("tree", R"J({"tree": "(1 (2", "masses": [1, 1]})J");
    CHECK(bad.code == cli::kConfigError);
    CHECK(bad.err.find("position 5") != std::string::npos);

    CHECK(run_cli("tree", R"J({"tree": "(1 2)", "masses": [1, 1], "colour": 1})J").code == cli::kConfigError);
    CHECK(run_cli("tree", R"J({"masses": [1, 1]})J").code == cli::kConfigError);
    CHECK(run_cli("tree", "{not json").code == cli::kConfigError);
}

TEST_CASE("decompose command") {
    const Run r3 = run_cli("decompose", R"J({"tree": "(1 (2 3))", "random_state": {"n": 3}})J", {"--seed", "5"});
    CHECK(r3.code == 0);
    CHECK(r3.out.find("L_{2,1}^2") != std::string::npos);
    CHECK(r3.out.find("agreement: ok") != std::string::npos);

    const Run zero = run_cli("decompose", R"J({"system": {"masses": [1, 1, 1], "positions": [[0,0,0],[1,0,0],[0,1,0]]}})J");
    CHECK(zero.code == 0);
    CHECK(zero.out.find("decomposition total      = 0") != std::string::npos);

    const Run degen = run_cli("decompose", R"J({"tree": "(1 (2 3))", "system": {"masses": [1, 1, 1],
        "positions": [[0,0,0],[1,0,0],[1,0,0]], "velocities": [[0,0,0],[0,1,0],[0,0,0]]}})J");
    CHECK(degen.code == cli::kDegenerate);
}

TEST_CASE("simulate command") {
    const Run ok = run_cli("simulate", R"J({"system": {"masses": [1, 1], "positions": [[0,0,0],[1,0,0]],
        "velocities": [[0,0,0],[0,1,0]]}, "potential": {"kind": "coulomb", "k": -1},
        "integrator": {"dt": 0.001, "steps": 100, "record_every": 50}})J");
    CHECK(ok.code == 0);
    CHECK(ok.out.rfind("t,E,Pcm,Ltot,rho,lambda_sq,decomp_total,x1,y1,z1,x2,y2,z2\n", 0) == 0);
    CHECK(ok.err.find("energy drift") != std::string::npos);

    const Run halted = run_cli("simulate", R"J({"system": {"masses": [1, 1], "positions": [[0,0,0],[0,0,0]]},
        "potential": {"kind": "coulomb", "k": -1}})J");
    CHECK(halted.code == cli::kIntegration);

    CHECK(run_cli("simulate", R"J({"system": {"masses": [1, 1], "positions": [[0,0,0],[1,0,0]]},
        "potential": {"kind": "morse"}})J").code == cli::kConfigError);
}

TEST_CASE("scatter command") {
    const Run r = run_cli("scatter", R"J({"E": 1, "b": [0, 1, 2], "potential": {"kind": "coulomb", "k": 1}})J");
    CHECK(r.code == 0);
    const Json j = Json::parse(r.out);
    const auto& res = j.at("results");
    REQUIRE(res.size() == 3);
    CHECK(res[0].at("Phi").get<double>() == 0.0);
    CHECK(res[1].at("chi").get<double>() == doctest::Approx(2 * std::atan(0.5)).epsilon(1e-6));
    CHECK(res[2].at("chi").get<double>() == doctest::Approx(2 * std::atan(0.25)).epsilon(1e-6));

    const Run free = run_cli("scatter", R"J({"E": 1, "b": 1, "potential": {"kind": "zero"}})J");
    CHECK(Json::parse(free.out).at("results")[0].at("chi").get<double>() == doctest::Approx(0.0).epsilon(1e-6));

    // Orbiting and errors are per-b records, not failures.
    const Run orbit = run_cli("scatter", R"J({"E": 1, "b": [1, 0.5], "potential": {"kind": "inverse_square", "c": -1}})J");
    CHECK(orbit.code == 0);
    CHECK(Json::parse(orbit.out).at("results")[0].at("status") != "ok");

    const Run avg = run_cli("scatter", R"J({"E": 2, "b": 1, "potential": {"form": "averaged", "kind": "coulomb", "k": 1,
        "masses": [1, 1, 1], "n_samples": 200}})J");
    CHECK(avg.code == 0);
    CHECK(Json::parse(avg.out).at("results")[0].at("status") == "ok");
}

TEST_CASE("veff command") {
    const Run c = run_cli("veff", R"J({"pair": {"kind": "constant", "c": 0.5}, "masses": [1, 1, 1],
        "rho": [1, 2], "n_samples": 20})J");
    CHECK(c.code == 0);
    CHECK(c.out == "rho,V_eff,stderr\n1,1.5,0\n2,1.5,0\n");

    const Run coul = run_cli("veff", R"J({"pair": {"kind": "coulomb", "k": 1}, "masses": [1, 1],
        "rho": [1, 2], "n_samples": 20})J");
    CHECK(coul.code == 0);
    CHECK(coul.out.find("nan") == std::string::npos);

    CHECK(run_cli("veff", R"J({"pair": {"kind": "coulomb"}, "masses": [1, 1], "rho": [1]})J").code == cli::kConfigError);
}

TEST_CASE("repeat runs are byte-identical") {
    const std::string cfg = R"J({"pair": {"kind": "lennard_jones", "epsilon": 1, "sigma": 0.5}, "masses": [1, 2, 3],
        "rho": {"min": 0.5, "max": 4, "count": 9, "spacing": "geometric"}, "n_samples": 300})J";
    const Run a = run_cli("veff", cfg, {"--seed", "9"});
    const Run b = run_cli("veff", cfg, {"--seed", "9"});
    const Run c = run_cli("veff", cfg, {"--seed", "10"});
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
    CHECK(a.out != c.out);
}

TEST_CASE("usage errors") {
    std::ostringstream out, err;
    const char* argv[] = {"hypertree", "fly", "--config", "x.json"};
    CHECK(cli::run(4, argv, out, err) == cli::kConfigError);
    const char* missing[] = {"hypertree", "tree", "--config", "/nonexistent/x.json"};
    CHECK(cli::run(4, missing, out, err) == cli::kConfigError);
}

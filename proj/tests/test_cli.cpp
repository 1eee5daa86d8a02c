#include "crn/cli.hpp"

#include "crn/io.hpp"
#include "crn/presets.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crn;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

RunResult run(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = run_command(cfg, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "crn_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

}  // namespace

TEST_CASE("check: three-species preset is a generalized potential game") {
    RunConfig cfg;
    cfg.command = "check";
    cfg.network = "example3";
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    const Json report = result.json();
    CHECK(report["verdict"] == "generalized potential");
    CHECK(report["detailed_balance"] == true);
    const auto eq = report["equilibrium"];
    for (int i = 0; i < 3; ++i) CHECK(std::abs(eq[i].get<double>() - 1.0) <= 1e-12);
    CHECK(report["generalized_potential_residual"]["max"].get<double>() <= 1e-10);
    CHECK(report["conservation_basis"].size() == 0);
}

TEST_CASE("check: autocatalytic one-species network") {
    const auto path = temp_file("auto.crn");
    std::ofstream(path) << "A <-> 2 A | kf=1 kb=1\n";
    RunConfig cfg;
    cfg.command = "check";
    cfg.network = path.string();
    cfg.init = "0.3";
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    const Json report = result.json();
    CHECK(std::abs(report["equilibrium"][0].get<double>() - 1.0) <= 1e-12);
    CHECK(report["verdict"] == "generalized potential");
}

TEST_CASE("check: evaluation trace CSV carries state, gradient, entropy, residual") {
    RunConfig cfg;
    cfg.command = "check";
    cfg.network = "example3";
    cfg.samples = 7;
    cfg.out_csv = temp_file("check_trace.csv").string();
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    const std::string csv = slurp(cfg.out_csv);
    CHECK(csv.rfind("S1,S2,S3,xi_S1,xi_S2,xi_S3,entropy,residual\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 samples
}

TEST_CASE("check: biased cycle exits with the negative verdict and a witness") {
    RunConfig cfg;
    cfg.command = "check";
    cfg.network = "cycle3";
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 2);
    const Json report = result.json();
    CHECK(report["verdict"] == "not generalized potential");
    CHECK(report["detailed_balance"] == false);
    REQUIRE(report.contains("first_order"));
    CHECK(report["first_order"]["detailed_balance"] == false);
    const Json witness = report["first_order"]["witness"];
    CHECK(witness["kind"] == "cycle_product");
    const double f = witness["forward_product"].get<double>();
    const double b = witness["backward_product"].get<double>();
    CHECK(std::min(f, b) == 1.0);
    CHECK(std::max(f, b) == 8.0);
}

TEST_CASE("simulate: CSV layout and summary") {
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.network = "ab";
    cfg.t_end = 1.0;
    cfg.step = 1e-3;
    cfg.out_csv = temp_file("ab.csv").string();
    cfg.out_json = temp_file("ab.json").string();
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);

    const std::string csv = slurp(cfg.out_csv);
    CHECK(csv.rfind("t,A,B,entropy,dissipation\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1002);  // header + 1001 rows

    const Json report = Json::parse(slurp(cfg.out_json));
    CHECK(report["entropy_monotone"] == true);
    CHECK(report["conservation_drift"].get<double>() <= 1e-9);
}

TEST_CASE("simulate: byte-identical outputs for identical configs") {
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.network = "example3";
    cfg.t_end = 0.5;
    const auto first = run(cfg);
    const auto second = run(cfg);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);

    RunConfig check_cfg;
    check_cfg.command = "check";
    check_cfg.network = "example1";
    CHECK(run(check_cfg).out == run(check_cfg).out);
}

TEST_CASE("equilibrate: reports the class equilibrium") {
    RunConfig cfg;
    cfg.command = "equilibrate";
    cfg.network = "example2";
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    const Json report = result.json();
    CHECK(report["detailed_balance"] == true);
    CHECK(report["max_flux_residual"].get<double>() <= 1e-10);
    CHECK(report["class_residual"].get<double>() <= 1e-10);
    CHECK(report["equilibrium"].size() == 8);

    cfg.network = "cycle3";
    CHECK(run(cfg).exit_code == 2);
}

TEST_CASE("rate: certificate for the isomerization preset") {
    RunConfig cfg;
    cfg.command = "rate";
    cfg.network = "ab";
    cfg.t_end = 20.0;
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    const Json report = result.json();
    CHECK(report["lambda"].get<double>() == 0.5);
    CHECK(report["lambda_exact"] == "1/2");
    CHECK(report["decay_verified"] == true);
    CHECK(std::abs(report["c1"].get<double>() -
                   1.0 / std::pow(std::sqrt(2.0) + 1.0, 2)) <= 1e-12);
}

TEST_CASE("rate: explicit decimal initial state keeps the exact path") {
    RunConfig cfg;
    cfg.command = "rate";
    cfg.network = "a2b";
    cfg.init = "2,1";
    cfg.t_end = 20.0;
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    CHECK(result.json()["lambda_exact"] == "1/2");
}

TEST_CASE("rate: multi-reaction networks are rejected with exit 1") {
    RunConfig cfg;
    cfg.command = "rate";
    cfg.network = "example2";
    const auto result = run(cfg);
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("single reversible reaction") != std::string::npos);
}

TEST_CASE("compare: ODE and descent limits coincide on the salt reaction") {
    RunConfig cfg;
    cfg.command = "compare";
    cfg.network = "example1";
    cfg.out_csv = temp_file("cmp").string();
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    const Json report = result.json();
    CHECK(report["limit_distance"].get<double>() <= 1e-4);
    CHECK(report["both_pass_equilibrium_check"] == true);
    CHECK(report["potential_descent"]["distance_to_equilibrium"].get<double>() <= 1e-5);
    CHECK(report["simultaneous_descent"]["distance_to_equilibrium"].get<double>() <=
          1e-5);

    const std::string ode_csv = slurp(cfg.out_csv + "_ode.csv");
    CHECK(ode_csv.rfind("t,NaCl,CaCO3,Na2CO3,CaCl2,entropy,dissipation\n", 0) == 0);
    const std::string descent_csv = slurp(cfg.out_csv + "_descent.csv");
    CHECK(descent_csv.rfind("iter,f,grad_norm,NaCl,CaCO3,Na2CO3,CaCl2\n", 0) == 0);
    CHECK(descent_csv.find("# {\"termination\":") != std::string::npos);
}

TEST_CASE("compare: descent variant is selectable") {
    RunConfig cfg;
    cfg.command = "compare";
    cfg.network = "example3";
    cfg.descent = "simultaneous";
    const auto result = run(cfg);
    REQUIRE(result.exit_code == 0);
    CHECK(result.json()["descent_variant"] == "simultaneous");

    cfg.descent = "nonsense";
    CHECK(run(cfg).exit_code == 1);
}

TEST_CASE("malformed inputs exit with code 1 and a diagnostic") {
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.network = "no_such_preset_or_file";
    auto result = run(cfg);
    CHECK(result.exit_code == 1);
    CHECK_FALSE(result.err.empty());

    const auto path = temp_file("broken.crn");
    std::ofstream(path) << "A <-> | kf=1 kb=1\n";
    cfg.network = path.string();
    cfg.init = "1,1";
    result = run(cfg);
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("line 1") != std::string::npos);

    cfg.network = "example3";
    cfg.init = "1,2";  // wrong dimension
    CHECK(run(cfg).exit_code == 1);

    cfg.init = "1,-2,1";
    CHECK(run(cfg).exit_code == 1);

    RunConfig bad;
    bad.command = "frobnicate";
    bad.network = "example3";
    CHECK(run(bad).exit_code == 1);
}

TEST_CASE("io: JSON round trips") {
    const auto net = preset_network("example2");
    const auto back = network_from_json(network_to_json(net));
    CHECK(back.species() == net.species());
    REQUIRE(back.reaction_count() == net.reaction_count());
    for (int r = 0; r < net.reaction_count(); ++r) {
        CHECK(back.reaction(r).alpha == net.reaction(r).alpha);
        CHECK(back.reaction(r).k_bw == net.reaction(r).k_bw);
    }

    Mat m(2, 3);
    m << 1, 2.5, -3, 0, 1e-9, 7;
    CHECK(matrix_from_json(matrix_to_json(m)) == m);
}

TEST_CASE("io: whitespace matrix reader") {
    std::istringstream text("1 2 3\n4 5 6\n");
    const Mat m = read_matrix_text(text);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m(1, 2) == 6.0);
    std::istringstream ragged("1 2\n3\n");
    CHECK_THROWS_AS(read_matrix_text(ragged), std::invalid_argument);
}

TEST_CASE("bundled .crn files stay in sync with the embedded presets") {
    for (const Preset& preset : presets()) {
        const auto path = fs::path(CRN_DATA_DIR) / (preset.name + ".crn");
        REQUIRE(fs::exists(path));
        CHECK(slurp(path) == preset.crn_text);
    }
}

TEST_CASE("io: doubles are printed in shortest round-trip form") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    const double awkward = 0.12345678901234567;
    CHECK(std::stod(format_double(awkward)) == awkward);
}

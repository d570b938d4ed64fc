#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cutfrac/driver.hpp"
#include "cutfrac/errors.hpp"

using namespace cutfrac;

namespace {

std::string temp_dir(const std::string& leaf) {
    const std::string d = std::filesystem::temp_directory_path().string() + "/" + leaf;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config defaults match the reference parameters") {
    const RunConfig cfg = parse_config_json("{}");
    CHECK(cfg.tau1 == doctest::Approx(1e-2));
    CHECK(cfg.tau2 == doctest::Approx(1e-3));
    CHECK(cfg.nx == std::vector<int>{10});
}

TEST_CASE("config overrides, strictness and range checks") {
    const RunConfig cfg =
        parse_config_json(R"({"domain":"example1","tau2":0,"nx":[5,10,20]})");
    CHECK(cfg.tau2 == doctest::Approx(0.0));
    CHECK(cfg.nx == std::vector<int>{5, 10, 20});
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(parse_config_json(R"({"tau3":1})"), ParamError);
    CHECK_THROWS_AS(parse_config_json("not json"), ParamError);

    RunConfig bad = parse_config_json(R"({"domain":"example1","tau1":-1})");
    CHECK_THROWS_AS(bad.validate(), ParamError);
    RunConfig bad2 = parse_config_json(R"({"domain":"example1","nx":1})");
    CHECK_THROWS_AS(bad2.validate(), ParamError);
    RunConfig bad3 = parse_config_json(R"({"domain":"example1","tau2":-0.5})");
    CHECK_THROWS_AS(bad3.validate(), ParamError);
}

TEST_CASE("unknown preset names are rejected with a usage hint") {
    RunConfig cfg;
    cfg.domain_source = "example99";
    std::ostringstream log;
    CHECK_THROWS_AS(run_solve(cfg, log), ParamError);
    try {
        run_solve(cfg, log);
    } catch (const ParamError& e) {
        CHECK(std::string(e.what()).find("example1") != std::string::npos);
    }
}

TEST_CASE("run_solve produces artifacts and prints errors for known solutions") {
    const std::string out = temp_dir("cutfrac_run");
    RunConfig cfg;
    cfg.domain_source = "example1";
    cfg.nx = {10};
    cfg.out_dir = out;
    cfg.emit_vtk = true;
    cfg.emit_csv = true;
    std::ostringstream log;
    CHECK(run_solve(cfg, log) == 0);
    const std::string text = log.str();
    CHECK(text.find("dofs:") != std::string::npos);
    CHECK(text.find("L2 error") != std::string::npos);
    CHECK(text.find("coercivity indicator") != std::string::npos);
    CHECK(std::filesystem::exists(out + "/example1_nx10_errors.csv"));
    CHECK(std::filesystem::exists(out + "/example1_nx10_d1_0.vtk"));
    CHECK(std::filesystem::exists(out + "/example1_nx10_d2_0.vtk"));
    CHECK(std::filesystem::exists(out + "/example1_nx10_d2_1.vtk"));
}

TEST_CASE("deterministic reruns produce bitwise-identical CSV output") {
    const std::string out1 = temp_dir("cutfrac_det1");
    const std::string out2 = temp_dir("cutfrac_det2");
    for (const std::string& out : {out1, out2}) {
        RunConfig cfg;
        cfg.domain_source = "example2";
        cfg.nx = {10};
        cfg.out_dir = out;
        cfg.emit_csv = true;
        cfg.deterministic = true;
        std::ostringstream log;
        CHECK(run_solve(cfg, log) == 0);
    }
    CHECK(slurp(out1 + "/example2_nx10_errors.csv") ==
          slurp(out2 + "/example2_nx10_errors.csv"));
}

TEST_CASE("convergence driver needs three levels and writes the rates table") {
    RunConfig cfg;
    cfg.domain_source = "example2";
    cfg.nx = {10, 20};
    std::ostringstream log;
    CHECK_THROWS_AS(run_convergence(cfg, log), ParamError);

    cfg.nx = {5, 10, 20};
    cfg.out_dir = temp_dir("cutfrac_conv");
    CHECK(run_convergence(cfg, log) == 0);
    CHECK(std::filesystem::exists(cfg.out_dir + "/example2_convergence.csv"));
    const std::string table = slurp(cfg.out_dir + "/example2_convergence.csv");
    CHECK(table.find("h,l2,energy,l2_rate,energy_rate") == 0);

    // presets without exact solutions cannot drive a study
    RunConfig cfg4;
    cfg4.domain_source = "example4";
    cfg4.nx = {5, 10, 20};
    cfg4.out_dir = cfg.out_dir;
    CHECK_THROWS_AS(run_convergence(cfg4, log), ParamError);
}

TEST_CASE("check driver passes on the junction preset") {
    RunConfig cfg;
    cfg.domain_source = "example4";
    cfg.nx = {10};
    std::ostringstream log;
    CHECK(run_check(cfg, log) == 0);
    CHECK(log.str().find("[PASS]") != std::string::npos);
    CHECK(log.str().find("[FAIL]") == std::string::npos);
}

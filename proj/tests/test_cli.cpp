#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gema/cli/commands.hpp"

using namespace gema;
using cli::Json;

namespace {

struct Outcome {
    int code = 0;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "gema");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string data(const char* name) { return std::string(GEMA_TEST_DATA) + "/" + name; }

std::vector<std::string> keys(const Json& j) {
    std::vector<std::string> k;
    for (const auto& [key, value] : j.items()) k.push_back(key);
    return k;
}

}  // namespace

TEST_CASE("report layout is fixed") {
    const auto o = run({"bhk", "x0^3*x1 + x1^3"});
    REQUIRE(o.code == 0);
    const Json j = Json::parse(o.out);
    CHECK(keys(j) == std::vector<std::string>{"schema_version", "command", "config", "input", "result", "checks",
                                              "passed", "failures"});
    CHECK(j["schema_version"] == cli::kSchemaVersion);
    CHECK(keys(j["config"]) == std::vector<std::string>{"seed", "samples", "level", "tolerances"});
    CHECK(j["result"]["weights"] == Json::array({2, 3}));
    CHECK(j["result"]["degree"] == 9);
    CHECK(j["result"]["mirror"]["weights"] == Json::array({3, 2}));
    CHECK(j["failures"].empty());
    CHECK(o.out.back() == '\n');
}

TEST_CASE("identical configuration, identical bytes") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"gema-check", "softmax", "--dim", "2", "--samples", "5"},
             {"syz", "x0^3+x1^3+x2^3", "--samples", "5"},
             {"expfam-check", "--dim", "3", "--samples", "5", "--format", "text"},
         }) {
        const auto a = run(args), b = run(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("seeds change sampled reports") {
    const auto a = run({"gema-check", "softmax", "--dim", "2", "--samples", "5", "--seed", "1"});
    const auto b = run({"gema-check", "softmax", "--dim", "2", "--samples", "5", "--seed", "2"});
    CHECK(a.out != b.out);
    CHECK(Json::parse(a.out)["config"]["seed"] == 1);
}

TEST_CASE("failing checks give exit 1 and a failure list") {
    const auto o = run({"gema-check", "softmax", "--dim", "2", "--samples", "3", "--tol", "ma_fd_relative=1e-30"});
    CHECK(o.code == 1);
    const Json j = Json::parse(o.out);
    CHECK(j["passed"] == false);
    REQUIRE(j["failures"].size() == 1);
    CHECK(j["failures"][0]["check"] == "ma_fd_relative");
    CHECK(j["config"]["tolerances"]["ma_fd_relative"] == 1e-30);
}

TEST_CASE("input errors give exit 2 with the error kind") {
    const auto o = run({"bhk", "x0*x1"});
    CHECK(o.code == 2);
    const Json j = Json::parse(o.out);
    CHECK(j["error"]["kind"] == "NotInvertible");
    CHECK(j["passed"] == false);

    CHECK(run({"gema-check", "banana"}).code == 2);
    CHECK(run({"kvn", data("zero_1d.json"), data("lg_params.json")}).code == 2);
    CHECK(run({"bhk", "x0^3", "--tol", "nonsense=1"}).code == 2);
    CHECK(run({"bhk", "x0^3", "--tol", "missing-equals"}).code == 2);
    CHECK(run({"nosuchcommand"}).code == 2);
    CHECK(run({"bhk", "x0^3", "--format", "xml"}).code == 2);
}

TEST_CASE("kvn on the constant minimizer") {
    const auto o = run({"kvn", data("minimizer_2d.json"), data("lg_params.json")});
    REQUIRE(o.code == 0);
    const Json j = Json::parse(o.out);
    // F0 = 0.25, alpha = 1, beta = 2 over 16 cells of area 0.25
    CHECK(std::abs(j["result"]["free_energy"].get<double>()) <= 1e-12);
    CHECK(j["result"]["lg_residual_max"].get<double>() <= 1e-12);
    CHECK(j["result"]["shape"] == Json::array({4, 4}));
}

TEST_CASE("text format and --out") {
    const std::string path = "test_cli_report.txt";
    const auto o = run({"cone-check", "--dim", "2", "--samples", "3", "--format", "text", "--out", path});
    CHECK(o.code == 0);
    CHECK(o.out.empty());
    std::ifstream in(path);
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str().find("status: PASS") != std::string::npos);
    CHECK(body.str().find("PASS kappa") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("syz reports the empty quintic slice") {
    const auto o = run({"syz", "x0^5+x1^5+x2^5+x3^5+x4^5", "--samples", "5"});
    REQUIRE(o.code == 0);
    const Json j = Json::parse(o.out);
    CHECK(j["result"]["empty_slice"] == true);
    const auto l = run({"syz", "x0^5+x1^5+x2^5+x3^5+x4^5", "--samples", "5", "--level", "1"});
    CHECK(Json::parse(l.out)["result"]["empty_slice"] == false);
}

TEST_CASE("default tolerance tables") {
    for (const char* c : {"gema-check", "expfam-check", "syz", "kvn", "cone-check"}) CHECK_FALSE(cli::default_tolerances(c).empty());
    CHECK(cli::default_tolerances("bhk").empty());
}

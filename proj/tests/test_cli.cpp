#include "diskgeo/cli.hpp"
#include "diskgeo/report.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace diskgeo;

namespace {
struct Run {
    int code;
    std::string out, err;
};
Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}
std::string tmp(const std::string& name) { return std::string(DISKGEO_TEST_TMP) + "/" + name; }
std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("analyze exit codes follow the verdict") {
    const auto compact = run({"analyze", "--weight", "exp:a=1,b=1", "--map", "scale:0.5"});
    CHECK(compact.code == 0);
    const auto j = Json::parse(compact.out);
    CHECK(j["schema"] == "diskgeo/1");
    CHECK(j["result"]["verdict"]["label"] == "Compact");
    CHECK(j["config"]["thresholds"]["n_angles"] == 64);
    CHECK(j["config"]["flags"]["map"] == "scale:0.5");
    CHECK(j.contains("version"));

    const auto unbounded = run({"analyze", "--weight", "exp:a=1,b=1", "--map", "affine:0.5,0.5"});
    CHECK(unbounded.code == 2);
    CHECK(Json::parse(unbounded.out)["result"]["verdict"]["label"] == "Unbounded");
}

TEST_CASE("dist reproduces the log-proxy oracle") {
    const auto r = run({"dist", "--weight", "logproxy:alpha=0", "--metric", "tau", "--from", "0,0", "--to", "0.9,0"});
    CHECK(r.code == 0);
    const double v = Json::parse(r.out)["result"]["value"];
    CHECK(v == doctest::Approx(2.3026).epsilon(0.02));
}

TEST_CASE("reports are byte-identical across runs") {
    const std::vector<std::string> args{"carleson", "--map", "id", "--samples", "2000", "--box-radii", "3",
                                        "--box-angles", "2", "--seed", "11"};
    const auto a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"analyze"}).code == 1);
    CHECK(run({"analyze", "--map", "nonsense"}).code == 1);
    CHECK(run({"dist", "--to", "0.5,0", "--metric", "euclid"}).code == 1);
    const auto bad = run({"analyze", "--map", "scale:2"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("NotSelfMap") != std::string::npos);
}

TEST_CASE("failed finite-sum hypothesis is inconclusive") {
    const auto r = run({"sumdiff", "--phi", "id", "--parts", "perturb:c=0.05,k=3"});
    CHECK(r.code == 3);
    CHECK(Json::parse(r.out)["result"]["verdict"]["label"] == "HypothesisViolated");
}

TEST_CASE("config file supplies options") {
    const std::string cfg = tmp("analyze.toml");
    std::ofstream(cfg) << "[analyze]\nmap = \"scale:0.5\"\nangles = 16\n";
    const auto r = run({"--config", cfg, "analyze"});
    CHECK(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["config"]["thresholds"]["n_angles"] == 16);
    CHECK(j["result"]["verdict"]["label"] == "Compact");
}

TEST_CASE("csv, svg and json outputs") {
    const std::string svg = tmp("gamma.svg"), csv = tmp("gamma.csv"), json = tmp("gamma.json");
    const auto r = run({"diff", "--phi", "id", "--psi", "mono:2", "--angles", "8", "--heatmap", svg, "--csv", csv,
                        "-o", json});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(Json::parse(slurp(json))["config"]["outputs"]["heatmap"] == svg);
    const std::string s = slurp(svg);
    CHECK(s.find("data-scale-min") != std::string::npos);
    CHECK(s.find("colorbar") != std::string::npos);
    CHECK(slurp(csv).rfind("angle,radius,x,y,value,trend\n", 0) == 0);
}

TEST_CASE("verify, path and weight validation") {
    CHECK(run({"verify", "--suite", "impot", "--points", "50"}).code == 0);
    CHECK(run({"weight-validate", "--weight", "exp:a=1,b=1"}).code == 0);
    CHECK(run({"weight-validate", "--weight", "logproxy:alpha=0"}).code == 2);
    const auto p = run({"path", "--phi", "id", "--psi", "perturb:c=0.05,k=3", "--tgrid", "0:1:0.5", "--angles", "8"});
    CHECK(p.code == 0);
}

TEST_CASE("map lists") {
    CHECK(cli::split_map_list("perturb:c=0.05,k=3,id") == std::vector<std::string>{"perturb:c=0.05,k=3", "id"});
    CHECK(cli::split_map_list("affine:0.5,0.5,comp:(mono:2)(scale:0.5,)") ==
          std::vector<std::string>{"affine:0.5,0.5", "comp:(mono:2)(scale:0.5,)"});
}

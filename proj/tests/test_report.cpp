#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "finslerkit/run.hpp"
#include "finslerkit/sampling.hpp"

using namespace fk;

namespace {

RunConfig config(const char* text) { return parse_config(Json::parse(text)); }

const Json* find_check(const RunResult& r, const std::string& name) {
    for (const auto& c : r.report["checks"]) {
        if (c["name"] == name) return &c;
    }
    return nullptr;
}

// Same keys, same types, numbers equal up to a small relative tolerance.
void compare_json(const Json& a, const Json& b, const std::string& path) {
    INFO(path);
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>(), y = b.get<double>();
        CHECK(std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y)) + 1e-12);
        return;
    }
    REQUIRE(a.type() == b.type());
    if (a.is_object()) {
        std::vector<std::string> ka, kb;
        for (auto it = a.begin(); it != a.end(); ++it) ka.push_back(it.key());
        for (auto it = b.begin(); it != b.end(); ++it) kb.push_back(it.key());
        REQUIRE(ka == kb);
        for (const auto& k : ka) compare_json(a[k], b[k], path + "." + k);
    } else if (a.is_array()) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) compare_json(a[i], b[i], path + "[" + std::to_string(i) + "]");
    } else {
        CHECK(a == b);
    }
}

}  // namespace

TEST_CASE("JSON numbers carry 17 significant digits and round-trip") {
    Json j;
    j["a"] = 0.1;
    j["b"] = 1.0;
    j["c"] = std::numeric_limits<double>::quiet_NaN();
    j["d"] = -0.0;
    j["e"] = Json::array({1e-300, 3});
    CHECK(dump_json(j, -1) == "{\"a\":0.10000000000000001,\"b\":1,\"c\":null,\"d\":0,\"e\":[1e-300,3]}\n");

    SplitMix64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-30, 30));
        const Json back = Json::parse(dump_json(Json(v)));
        CHECK(back.get<double>() == v);
    }
}

TEST_CASE("checks") {
    CHECK(make_check("a", 1e-9, 1e-8).pass);
    CHECK_FALSE(make_check("a", 1e-8, 1e-8).pass);
    CHECK_FALSE(make_check("a", std::numeric_limits<double>::quiet_NaN(), 1.0).pass);
    CHECK(to_json(make_check("a", 0.5, 1.0)).dump() ==
          R"j({"name":"a","max_residual":0.5,"tolerance":1.0,"pass":true})j");
}

TEST_CASE("config parsing and validation") {
    const RunConfig c = config(R"j({"catalog": "catalog:sphere2"})j");
    CHECK(c.catalog == "sphere2");
    CHECK(c.sampling.seed == 42);
    CHECK(c.sampling.count == 32);
    CHECK(c.tolerances.rank == 1e-8);
    CHECK(c.tolerances.residual == 1e-7);
    CHECK(c.tolerances.classify == 1e-7);
    CHECK(c.tolerances.frame_k == 1e-6);
    CHECK(c.taylor_order == 8);
    CHECK(c.bracket_depth == 4);
    CHECK(default_analyses(c) == std::vector<std::string>{"analyze", "classify", "holonomy", "invariance"});
    CHECK(config(R"j({"model": "catalog:funk_disk2"})j").catalog == "funk_disk2");

    auto message = [](const char* text) {
        try {
            config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(R"j({"model": {"finsler": "sqrt(y1^2+y2^2)"},
                      "sampling": {"x_box": [[-1,1],[-1,1]], "y_box": [[-1,1],[-1,1]]}})j") ==
          "fiber box must exclude origin");
    CHECK(message(R"j({"catalog": "sphere2", "extra": 1})j") == "unknown key 'extra' in config");
    CHECK(message(R"j({"catalog": "nowhere"})j") == "unknown catalog entry 'nowhere'");
    CHECK(message(R"j({"catalog": "sphere2", "analyses": ["plot"]})j") == "unknown analysis 'plot'");
    CHECK(message(R"j({"model": {"spray": ["0", "0"]}, "analyses": ["classify"],
                      "sampling": {"x_box": [[0,1],[0,1]], "y_box": [[1,2],[1,2]]}})j") ==
          "classify needs a Finsler function on a surface");
    CHECK(message(R"j({"model": {"finsler": "y1"}})j") == "sampling needs x_box and y_box for a non-catalog model");
    CHECK(message(R"j({"catalog": "sphere2", "sampling": {"count": 0}})j") == "sampling count must be positive");
    CHECK(message(R"j({"catalog": "sphere2", "sampling": {"x_box": [[1,0],[0,1]]}})j") == "sampling box is empty");
    CHECK(message(R"j({"catalog": "sphere2", "taylor_order": "high"})j") == "config.taylor_order has the wrong type");
    CHECK(message(R"j({"catalog": "sphere2", "analyses": ["transport"]})j") ==
          "transport needs a curve and v0 with one entry per dimension");
    CHECK(message(R"j({"catalog": "sphere2", "model": {"finsler": "y1"}})j") ==
          "config needs exactly one model (catalog, finsler expression or spray)");
}

TEST_CASE("model and candidate rejection are input errors") {
    CHECK_THROWS_AS(run(config(R"j({"model": {"finsler": "y1^2 + y2^2"},
                                   "sampling": {"x_box": [[0,1],[0,1]], "y_box": [[1,2],[1,2]]}})j")),
                    ConfigError);
    CHECK_THROWS_AS(run(config(R"j({"model": {"finsler": "sqrt(y1^2 + y2^2"},
                                   "sampling": {"x_box": [[0,1],[0,1]], "y_box": [[1,2],[1,2]]}})j")),
                    ConfigError);
    CHECK_THROWS_AS(run(config(R"j({"catalog": "sphere2", "analyses": ["invariance"],
                                   "candidates": [{"expression": "y1^2", "degree": 1}]})j")),
                    ConfigError);
}

TEST_CASE("run: sphere classification and holonomy") {
    const RunResult r = run(config(R"j({"catalog": "sphere2", "analyses": ["classify", "holonomy"]})j"));
    CHECK(r.exit_code == 0);
    CHECK(r.report["classification"] == "riemannian");
    CHECK(r.report["holonomy"]["ms_estimate"] == 1);
    CHECK(r.report["holonomy"]["final_rank"] == 3);
    CHECK(r.report["holonomy"]["regular_across_samples"] == true);
    CHECK(r.report["points"].size() == 32);
    CHECK(r.report["points"][0]["surface"].contains("beta_identity_residual"));
}

TEST_CASE("run: Euclidean holonomy") {
    const RunResult r = run(config(R"j({"catalog": "euclidean2", "analyses": ["holonomy"]})j"));
    CHECK(r.exit_code == 0);
    CHECK(r.report["holonomy"]["final_rank"] == 2);
    CHECK(r.report["holonomy"]["ms_estimate"] == 2);
    CHECK(r.report["holonomy"]["vertical_rank"] == 0);
    CHECK(r.report["classification"].is_null());
}

TEST_CASE("run: invariance on the flat spray") {
    const RunResult r = run(config(R"j({"model": {"spray": ["0", "0"]}, "analyses": ["invariance"],
        "candidates": [{"name": "E", "expression": "sqrt(y1^2+y2^2)", "degree": 1},
                       {"name": "Q", "expression": "y1*x1 + y2", "degree": 1}],
        "sampling": {"x_box": [[-1,1],[-1,1]], "y_box": [[0.25,1.5],[-1.5,1.5]]}})j"));
    const Json& E = r.report["invariance"]["E"];
    CHECK(E["s_invariance"] == 0.0);
    CHECK(E["rank_VP"] == Json::array({1, 1}));
    CHECK(E["vhol_in_vp"]["included"] == true);
    CHECK(E["vhol_in_vp"]["rank_vhol"] == 0);
    CHECK((*find_check(r, "E/vhol_in_vp"))["pass"] == true);
    // y1 x1 + y2 is not constant along straight lines.
    CHECK((*find_check(r, "Q/s_invariance"))["pass"] == false);
    CHECK(r.exit_code == 1);
}

TEST_CASE("run: flows") {
    const RunResult r = run(config(R"j({"catalog": "sphere2", "analyses": ["geodesic", "transport"],
        "transport": {"curve": ["1", "6.283185307179586*t"], "v0": [0.5, 0.0]}})j"));
    CHECK(r.exit_code == 0);
    const Json& v1 = r.report["transport"]["v1"];
    // Latitude loop at colatitude 1 rotates by 2 pi (1 - cos 1) in the orthonormal frame.
    const double angle = std::atan2(std::sin(1.0) * v1[1].get<double>(), v1[0].get<double>());
    const double expected = std::remainder(2 * M_PI * (1 - std::cos(1.0)), 2 * M_PI);
    CHECK(std::abs(std::abs(angle) - std::abs(expected)) < 1e-4);
    CHECK(r.report["geodesic"]["F_drift"].get<double>() < 1e-10);
}

TEST_CASE("reports are reproducible") {
    const RunConfig c = config(R"j({"catalog": "sphere2"})j");
    const std::string a = dump_json(run(c, Exec::Serial).report);
    const std::string b = dump_json(run(c, Exec::Serial).report);
    CHECK(a == b);
    const RunResult p = run(c, Exec::Parallel);
    CHECK(dump_json(p.report["aggregates"]) == dump_json(Json::parse(a)["aggregates"]));
    CHECK(p.exit_code == 0);
}

TEST_CASE("report schema matches the committed sphere2 report") {
    std::ifstream golden(FK_SOURCE_DIR "/tests/golden/sphere2_report.json");
    REQUIRE(golden.good());
    const Json expected = Json::parse(golden);
    const Json actual = run(load_config(FK_SOURCE_DIR "/tests/golden/sphere2_config.json"), Exec::Serial).report;
    for (const char* key : {"config_echo", "points", "aggregates", "checks", "classification", "holonomy"}) {
        CHECK(actual.contains(key));
    }
    compare_json(actual, expected, "report");
}

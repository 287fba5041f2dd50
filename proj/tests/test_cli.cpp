#include "autoint/cases.hpp"
#include "autoint/config.hpp"
#include "autoint/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace autoint;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("autoint_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("ini parsing, overrides and defaults") {
    auto cfg = RunConfig::from_ini_string("[run]\ncase = european\n[optimizer]\nepochs = 12\n");
    cfg.set("optimizer.learning_rate", "0.01");
    cfg.set("grid", "nx", "10");
    std::ostringstream notes;
    cfg.resolve(case_schema("european"), &notes);
    CHECK(cfg.get_int("optimizer", "epochs") == 12);
    CHECK(cfg.get_double("optimizer", "learning_rate") == 0.01);
    CHECK(cfg.get_int("run", "seed") == 7);
    CHECK(notes.str().find("notice: run.seed not set") != std::string::npos);
    CHECK(notes.str().find("optimizer.epochs") == std::string::npos);

    auto bad = RunConfig::from_ini_string("[run]\ncase = european\n[optimizer]\nlearnin_rate = 1\n");
    CHECK_THROWS_AS(bad.resolve(case_schema("european"), nullptr), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_ini_string("[run\ncase"), ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
    auto a = load_run_config("european", "", {{"optimizer.epochs", "3"}}, nullptr);
    auto b = load_run_config("european", "", {{"optimizer.epochs", "3"}}, nullptr);
    auto c = load_run_config("european", "", {{"optimizer.epochs", "4"}}, nullptr);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
}

TEST_CASE("lists and ranges") {
    CHECK(parse_list("1,2.5,-3") == std::vector<double>{1.0, 2.5, -3.0});
    const auto r = parse_list("0:8:9");
    REQUIRE(r.size() == 9);
    CHECK(r[8] == 8.0);
    CHECK_THROWS_AS(parse_list("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_list("a,b"), ConfigError);
}

TEST_CASE("case selection") {
    CHECK_THROWS_AS(load_run_config("custom", "", {}, nullptr), ConfigError);
    CHECK_THROWS_AS(load_run_config("nonsense", "", {}, nullptr), ConfigError);
    CHECK_THROWS_AS(load_run_config("european", "", {{"run.case", "asian"}}, nullptr), ConfigError);
    CHECK_THROWS_AS(load_run_config("european", "/nonexistent/x.ini", {}, nullptr), ConfigError);
    const auto cfg = load_run_config("population", "", {}, nullptr);
    CHECK(cfg.get("run", "model") == "dqc");
    CHECK(cfg.get("optimizer", "algorithm") == "adabelief");
}

TEST_CASE("short runs write identical artifacts twice") {
    const std::vector<std::pair<std::string, std::string>> ov = {
        {"optimizer.epochs", "5"}, {"grid.nx", "10"}, {"grid.nt", "4"}, {"data.samples", "20"}};
    const auto cfg = load_run_config("european", "", ov, nullptr);
    const auto d1 = scratch("a"), d2 = scratch("b");
    write_artifacts(run_case(cfg, {}), cfg, d1.string());
    write_artifacts(run_case(cfg, {2, nullptr}), cfg, d2.string());
    for (const std::string f : {"results.csv", "comparison.csv", "loss_g1.csv", "model_g2.json"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(d1 / f));
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    // timings differ, nothing else may
    auto strip = [](nlohmann::json j) {
        for (auto& [k, v] : j["training"].items()) v.erase("wall_seconds");
        return j;
    };
    CHECK(strip(nlohmann::json::parse(slurp(d1 / "report.json"))) ==
          strip(nlohmann::json::parse(slurp(d2 / "report.json"))));
    const auto rows = read_comparison(d1.string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].query == "payoff");
    CHECK(rows[0].oracle == doctest::Approx(0.104169997248).epsilon(1e-9));
    CHECK_THROWS_AS(read_comparison((d1 / "missing").string()), UsageError);
}

TEST_CASE("moi sweep names one job per angular velocity") {
    const auto cfg = load_run_config(
        "moi", "", {{"optimizer.epochs", "2"}, {"constants.omega_sweep", "0:4:3"}, {"grid.nr", "8"}}, nullptr);
    const auto art = run_case(cfg, {});
    REQUIRE(art.comparison.size() == 3);
    CHECK(art.comparison[2].query == "I@omega=4");
    CHECK(art.models.size() == 6);
}

} // TEST_SUITE

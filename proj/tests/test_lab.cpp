#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wkam/lab.hpp"

using namespace wkam;

namespace {

constexpr double kPi = 3.14159265358979323846;

nlohmann::json coarse_json(const std::string& kind, const std::string& model, int n) {
    return {{"kind", kind},
            {"model", {{"name", model}, {"n", n}}},
            {"points_per_period", 64},
            {"tau", 0.02},
            {"velocity_count", 61}};
}

}  // namespace

TEST_CASE("config parsing: defaults and field overrides") {
    ExperimentConfig cfg = parse_config({{"kind", "solve"}});
    CHECK(cfg.kind == "solve");
    CHECK(cfg.model_name == "pendulum");
    CHECK(cfg.points_per_period == 256);
    CHECK(cfg.tau == 0.01);
    CHECK(cfg.velocity_count == 121);
    CHECK(cfg.lambda_ladder.size() == 9);
    CHECK(cfg.lambda_ladder.front() == 0.5);
    CHECK(cfg.lambda_ladder.back() == doctest::Approx(1.0 / 512));
    CHECK_FALSE(cfg.c.has_value());

    nlohmann::json j = coarse_json("mather", "alpha_coupled", 4);
    j["c"] = 1.5;
    j["sources"] = {0, 3};
    cfg = parse_config(j);
    CHECK(cfg.model_params.n == 4);
    CHECK(*cfg.c == 1.5);
    CHECK(cfg.sources == std::vector<int>{0, 3});
    CHECK(cfg.make_model().period == 4.0);
    CHECK(cfg.make_model_grid().points == 256);
    CHECK(cfg.make_scheme().vgrid.count == 61);
}

TEST_CASE("config parsing: strictness") {
    nlohmann::json j = {{"kind", "solve"}, {"tua", 0.01}};  // typo must be fatal
    CHECK_THROWS_WITH_AS((void)parse_config(j), doctest::Contains("unknown field"),
                         std::invalid_argument);
    j = {{"kind", "solve"}, {"model", {{"name", "pendulum"}, {"m", 2}}}};
    CHECK_THROWS_AS((void)parse_config(j), std::invalid_argument);
    j = {{"kind", "solve"}, {"lambda_ladder", {0.1, 0.2}}};  // must decrease
    CHECK_THROWS_AS((void)parse_config(j), std::invalid_argument);
    j = {{"kind", "solve"}, {"lambda_ladder", {0.1, 0.0}}};  // must stay positive
    CHECK_THROWS_AS((void)parse_config(j), std::invalid_argument);
    CHECK_THROWS_AS((void)load_config("/tmp/wkam_missing_config.json"), std::runtime_error);
}

TEST_CASE("glued quadrature solutions hit the known peak values") {
    Grid g = make_grid(4.0, 1024);
    GridFunction v1 = pendulum_v1(g);
    GridFunction v2 = pendulum_v2(g);
    CHECK(interp(v1, 0.5) == doctest::Approx(2.0 / kPi).epsilon(1e-4));
    CHECK(interp(v2, 1.0) == doctest::Approx(4.0 / kPi).epsilon(1e-4));
    // periodicity of the sampled families
    CHECK(interp(v1, 1.5) == doctest::Approx(interp(v1, 0.5)).epsilon(1e-9));
    CHECK(interp(v2, 3.0) == doctest::Approx(interp(v2, 1.0)).epsilon(1e-9));
    CHECK(v1.values[0] == doctest::Approx(0.0));
    CHECK(v2.values[0] == doctest::Approx(0.0));
    // v2 dominates v1 on the first period and both vanish at integers
    CHECK(interp(v1, 1.0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(interp(v2, 2.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("run_critical report and artifacts") {
    nlohmann::json j = coarse_json("critical", "pendulum", 1);
    std::string dir = "/tmp/wkam_lab_critical";
    std::filesystem::remove_all(dir);
    j["out_dir"] = dir;
    ExperimentConfig cfg = parse_config(j);
    ExperimentReport rep = run_experiment(cfg);
    CHECK(rep.kind == "critical");
    CHECK(rep.all_pass());
    CHECK(rep.summary["lp"].get<double>() == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(std::filesystem::exists(dir + "/report.json"));
    CHECK(std::filesystem::exists(dir + "/critical.csv"));

    nlohmann::json back;
    std::ifstream(dir + "/report.json") >> back;
    CHECK(back["kind"] == "critical");
    CHECK(back["all_pass"].get<bool>());
    CHECK(back["verdicts"].size() == rep.verdicts.size());
}

TEST_CASE("run_solve produces a converged artifact") {
    nlohmann::json j = coarse_json("solve", "discounted_linear", 1);
    j["lambda_ladder"] = {0.1};
    std::string dir = "/tmp/wkam_lab_solve";
    std::filesystem::remove_all(dir);
    j["out_dir"] = dir;
    ExperimentReport rep = run_experiment(parse_config(j));
    CHECK(rep.all_pass());
    CHECK(std::filesystem::exists(dir + "/u.csv"));
    CHECK(std::filesystem::exists(dir + "/solution.json"));
}

TEST_CASE("run_limit refuses models that break L4") {
    nlohmann::json j = coarse_json("limit", "alpha_coupled", 4);
    CHECK_THROWS_WITH_AS((void)run_experiment(parse_config(j)), doctest::Contains("counterexample"),
                         std::runtime_error);
}

TEST_CASE("run_convergence on a short coarse ladder") {
    nlohmann::json j = coarse_json("converge", "discounted_linear", 1);
    j["lambda_ladder"] = {0.25, 0.125, 0.0625};
    ExperimentReport rep = run_experiment(parse_config(j));
    CHECK(rep.all_pass());
    auto ladder = rep.summary["ladder"];
    REQUIRE(ladder.size() == 3);
    double e0 = ladder[0]["error"].get<double>();
    double e2 = ladder[2]["error"].get<double>();
    CHECK(e2 < e0);
}

TEST_CASE("run_uniqueness_probe flags the coupled model") {
    nlohmann::json j = coarse_json("uniqueness", "alpha_coupled", 4);
    j["lambda_ladder"] = {0.125};
    j["seeds"] = {0.0};
    j["include_glued_seeds"] = true;
    ExperimentReport rep = run_experiment(parse_config(j));
    CHECK(rep.summary["verdict"] == "multiple solutions");
    CHECK(rep.summary["max_pairwise_dist"].get<double>() > 1.0);
}

TEST_CASE("run_shifted pins c0 near -1 for the linear model") {
    nlohmann::json j = coarse_json("shifted", "discounted_linear", 1);
    j["lambda_ladder"] = {0.25, 0.125};
    ExperimentReport rep = run_experiment(parse_config(j));
    CHECK(rep.all_pass());
    CHECK(rep.summary["c0"].get<double>() == doctest::Approx(-1.0).epsilon(2e-2));
    CHECK(std::fabs(rep.summary["shifted_critical"].get<double>()) <= 2e-2);
}

TEST_CASE("unknown experiment kind") {
    ExperimentConfig cfg = parse_config({{"kind", "frobnicate"}});
    CHECK_THROWS_AS((void)run_experiment(cfg), std::invalid_argument);
}

#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "wkam/critical.hpp"
#include "wkam/mather.hpp"
#include "wkam/model.hpp"
#include "wkam/solver.hpp"

namespace wkam {

struct ExperimentConfig {
    std::string kind;  // solve|critical|mather|barrier|limit|converge|counterexample|uniqueness|shifted
    std::string model_name{"pendulum"};
    ModelParams model_params;
    int points_per_period{256};
    double tau{0.01};
    double vmax{3.0};
    int velocity_count{121};
    double tol{1e-9};
    int max_iter{200000};
    double damping{1.0};
    std::vector<double> lambda_ladder{0.5, 0.25, 0.125, 0.0625, 0.03125,
                                      0.015625, 0.0078125, 0.00390625, 0.001953125};
    int anchor{0};
    std::optional<double> c;  // right-hand-side constant; defaults to the LP critical value
    double t1{20.0};
    double t2{40.0};
    std::vector<double> seeds{0.0};
    bool include_glued_seeds{false};
    std::pair<double, double> bracket{-2.0, 0.0};
    double check_tol{1e-3};       // scheme-level verification tolerance
    double uniqueness_tol{1e-4};  // pairwise distance threshold for the probe
    std::vector<int> sources{0};  // barrier sources
    std::string out_dir;

    Model make_model() const;
    Grid make_model_grid() const;
    SchemeParams make_scheme() const;
};

/// Strict parse: unknown fields are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct Verdict {
    std::string name;
    bool pass{false};
    double lhs{0.0};
    double rhs{0.0};
    double tol{0.0};
    std::string note;
};

struct ExperimentReport {
    std::string kind;
    nlohmann::json summary;
    std::vector<Verdict> verdicts;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

/// Writes report.json plus per-kind CSV artifacts into dir (created if absent).
void write_report(const ExperimentReport& rep, const std::string& dir);

ExperimentReport run_solve(const ExperimentConfig& cfg);
ExperimentReport run_critical(const ExperimentConfig& cfg);
ExperimentReport run_mather(const ExperimentConfig& cfg);
ExperimentReport run_barrier(const ExperimentConfig& cfg);
ExperimentReport run_limit(const ExperimentConfig& cfg);
ExperimentReport run_convergence(const ExperimentConfig& cfg);
ExperimentReport run_counterexample(const ExperimentConfig& cfg);
ExperimentReport run_uniqueness_probe(const ExperimentConfig& cfg);
ExperimentReport run_shifted(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// The two explicit pendulum solutions of the glued construction, sampled by
/// composite-Simpson quadrature of the integrand 2|sin(pi s)| at 10x grid
/// oversampling. v1 is 1-periodic, v2 is 2-periodic and C^1.
GridFunction pendulum_v1(const Grid& g);
GridFunction pendulum_v2(const Grid& g);

/// Everything the selection formula needs, bundled for reuse.
struct LimitPipeline {
    ClosedMeasurePolytope polytope;
    MatherResult mather;
    L4Report l4;
    BarrierTable barrier;
    GridFunction u0;
    double c{0.0};  // LP critical value used as the equation constant
};

LimitPipeline build_limit_pipeline(const ExperimentConfig& cfg, const Model& m);

}  // namespace wkam

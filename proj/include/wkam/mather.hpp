#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wkam/measure.hpp"
#include "wkam/model.hpp"
#include "wkam/simplex.hpp"
#include "wkam/solver.hpp"

namespace wkam {

/// LP feasible set of discrete closed probability measures on the
/// (node, velocity) product grid: nonnegativity, unit mass, and one closure
/// row per hat basis function.
struct ClosedMeasurePolytope {
    Grid grid;
    VelocityGrid vgrid;
    double tau{0.0};
    SparseLP base;  // closure rows [0, points) then the mass row; costs unset

    int num_vars() const { return grid.points * vgrid.count; }
    int mass_row() const { return grid.points; }
};

ClosedMeasurePolytope build_polytope(const Grid& g, const VelocityGrid& vg, double tau);

struct MatherResult {
    double value{0.0};  // min of integral of L^r, equals -c(H^r) up to discretization
    OccupationMeasure mu;
    SimplexResult lp;
};

/// Minimizes the integral of L(x, v, r) over the closed-measure polytope.
MatherResult solve_mather_lp(const ClosedMeasurePolytope& p, const Model& m, double r = 0.0);

enum class OptSense { minimize, maximize };

struct FaceResult {
    double value{0.0};
    OccupationMeasure mu;
    bool feasible{true};
};

/// Optimizes a secondary objective over the epsilon-optimal face
/// { mu : integral of L^r d mu <= lp_value + face_tol }.
/// objective gives per-(node, velocity) weights; face_tol < 0 selects the
/// default 1e-7 * (1 + |lp_value|).
FaceResult optimal_face_optimize(const ClosedMeasurePolytope& p, const Model& m, double r,
                                 const MatherResult& lp_result,
                                 const std::vector<double>& objective, OptSense sense,
                                 double face_tol = -1.0);

struct L4Report {
    double mather_optimum{0.0};   // the LP value (= -c up to discretization)
    double face_max_dLdu{0.0};    // max of integral of dL/du(.,.,0) over the face
    std::string verdict;          // "holds", "fails", or "marginal"
    bool holds() const { return verdict == "holds"; }
};

/// (L4) probe: maximizes the coupling integral over the optimal face.
L4Report check_L4(const ClosedMeasurePolytope& p, const Model& m,
                  const MatherResult& lp_result, double margin = 1e-3);

struct BarrierTable {
    Grid grid;
    std::vector<int> sources;              // node indices
    std::vector<GridFunction> values;      // h(source, .) per source
    double t1{0.0}, t2{0.0}, tau{0.0};
    std::vector<double> fixed_point_residual;  // per source
    std::vector<double> window_oscillation;    // per source
    bool window_ok{true};

    const GridFunction& row(int source_node) const;
    bool has_source(int source_node) const;
};

/// Peierls barrier h(x, y): windowed min of the finite-horizon actions h_t
/// over t in [T1, T2], model frozen at u = 0, with the critical constant c.
/// osc_tol flags sources whose h_t still oscillates by more than 10*osc_tol
/// over the window.
BarrierTable peierls_barrier(const Model& m, const std::vector<int>& sources, double c,
                             double t1, double t2, const SchemeParams& sp, const Grid& g,
                             double osc_tol = 1e-3);

/// Nodes with h(x, x) <= tol; requires the table to carry those sources.
std::vector<int> aubry_set(const BarrierTable& bt, double tol);

void write_csv(const BarrierTable& bt, const std::string& path);

/// Nodes that can carry mass on the epsilon-optimal face; these are the
/// barrier sources select_u0 needs. Computed by one auxiliary LP that
/// maximizes the sum of per-node masses clipped at mass_cap over the face,
/// so a node is reported exactly when some near-optimal closed measure puts
/// non-negligible mass on it (reduced costs cannot answer this: at a
/// degenerate optimum they vanish along the whole discrete characteristic
/// flow, not just on the face).
std::vector<int> face_support_nodes(const ClosedMeasurePolytope& p, const Model& m,
                                    const MatherResult& lp_result, double mass_cap = 1e-4);

struct SelectU0Options {
    double face_tol{-1.0};  // < 0: default
};

/// Selection formula for the vanishing-discount limit: per node x, minimizes
/// the barrier-weighted ratio over the optimal face via the Charnes-Cooper
/// substitution (denominator normalized to -1, one LP per node).
/// Requires check_L4 to hold; throws otherwise.
GridFunction select_u0(const ClosedMeasurePolytope& p, const Model& m,
                       const MatherResult& lp_result, const L4Report& l4,
                       const BarrierTable& bt, const SelectU0Options& opts = {});

struct LargestSubsolutionReport {
    double min_onestep_slack{0.0};   // (i) min over nodes of (T u0 - u0)
    double face_min_weighted{0.0};   // (ii) min over face of integral of u0 dL/du
    double shifted_face_min{0.0};    // (ii) re-run on u0 + delta
    bool subsolution_ok{false};
    bool constraint_ok{false};
    bool shifted_violates{false};
    double envelope_gap{0.0};        // max of (barrier envelope - u0) over nodes covered
    bool is_largest{false};
};

LargestSubsolutionReport verify_largest_subsolution(
    const GridFunction& u0, const Model& m, const ClosedMeasurePolytope& p,
    const MatherResult& lp_result, const BarrierTable& bt, double c,
    const SchemeParams& sp, double tol = 1e-6, double delta = 0.05);

}  // namespace wkam

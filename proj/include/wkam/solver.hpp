#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wkam/measure.hpp"
#include "wkam/model.hpp"
#include "wkam/torus_grid.hpp"

namespace wkam {

struct SchemeParams {
    double tau{0.01};
    VelocityGrid vgrid;
    double tol{1e-9};
    int max_iter{200000};
    double damping{1.0};
};

/// Default reference resolution: 256 points per unit period, tau = 0.01,
/// vmax = 3, 121 velocities, residual tol 1e-9.
SchemeParams reference_scheme();
Grid reference_grid(double period);

/// Throws if tau * vmax > period / 2.
void validate_scheme(const SchemeParams& sp, const Grid& g);

struct DiscountedSolution {
    double lambda{0.0};
    double c{0.0};
    GridFunction u;
    int iterations{0};
    double residual{0.0};
    bool converged{false};
    std::string message;
};

/// One backward semi-Lagrangian value-iteration sweep:
///   (Tf)(x) = min_v { interp(f, x - tau v) + tau (L(x, v, discount(x)) + c) }.
/// Monotone in f; commutes with constants when L ignores u.
GridFunction lax_oleinik_step(const Model& m, const GridFunction& discount_field,
                              const GridFunction& f, double c, const SchemeParams& sp);

/// Fixed point of the discounted operator (discount field lambda*u).
/// lambda = 0 requires an anchor node (solution normalized to u[anchor] = 0);
/// throws "unanchored critical solve" otherwise. Affine-in-u models with
/// lambda > 0 are accelerated by policy iteration; the returned residual is
/// always the plain one-more-step residual.
DiscountedSolution solve_discounted(const Model& m, double lambda, double c,
                                    const SchemeParams& sp, const GridFunction& init,
                                    std::optional<int> anchor = std::nullopt);

/// Throws on non-converged solutions.
const DiscountedSolution& require_converged(const DiscountedSolution& sol);

/// Finite-horizon actions h_t(source, .) for t = 0, tau, ..., T, via DP with
/// h_0 = BIG off the source. The model is frozen at u = r.
std::vector<GridFunction> finite_horizon_action(const Model& m, double r, int source_node,
                                                double horizon, double c,
                                                const SchemeParams& sp, const Grid& g,
                                                double big = 1e6);

struct DominationReport {
    double worst_slack{0.0};     // most negative curve slack observed
    int trials{0};
    bool rest_curves_ok{false};  // per-node rest-curve slack nonnegative
    double worst_rest_slack{0.0};
};

/// Samples random piecewise-linear grid curves and checks the discrete
/// domination inequality for the converged solution.
DominationReport verify_domination(const Model& m, const DiscountedSolution& sol,
                                   const SchemeParams& sp, int trials, unsigned seed = 1234);

struct CalibratedStep {
    double time;      // <= 0
    double position;  // in [0, period)
    double velocity;  // chosen grid velocity at this step
    double action;    // tau * (L + c) of this step
};

struct CalibratedPath {
    std::vector<CalibratedStep> steps;  // backward in time from the start point
    double total_action{0.0};
};

/// Greedy backward argmin of the one-step operator; ties break toward smaller
/// |v|, then toward negative v.
CalibratedPath backtrack_calibrated(const Model& m, const DiscountedSolution& sol,
                                    int start_node, int steps, const SchemeParams& sp);

/// Discounted occupation measure of a calibrated path: step (x_k, v_k) gets
/// weight exp(lambda * sum over later steps of dL/du(.,.,0) * tau), normalized.
OccupationMeasure build_discounted_occupation(const Model& m, const CalibratedPath& path,
                                              double lambda, const Grid& g,
                                              const VelocityGrid& vg, double tau);

}  // namespace wkam

#include "wkam/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wkam {

SchemeParams reference_scheme() {
    SchemeParams sp;
    sp.tau = 0.01;
    sp.vgrid = make_velocity_grid(3.0, 121);
    sp.tol = 1e-9;
    sp.max_iter = 200000;
    sp.damping = 1.0;
    return sp;
}

Grid reference_grid(double period) {
    return make_grid(period, static_cast<int>(std::lround(256 * period)));
}

void validate_scheme(const SchemeParams& sp, const Grid& g) {
    if (!(sp.tau > 0.0)) throw std::invalid_argument("scheme: tau must be positive");
    if (!(sp.tol > 0.0)) throw std::invalid_argument("scheme: tol must be positive");
    if (sp.damping <= 0.0 || sp.damping > 1.0)
        throw std::invalid_argument("scheme: damping must be in (0,1]");
    if (sp.tau * sp.vgrid.vmax > 0.5 * g.period)
        throw std::invalid_argument("scheme: tau*vmax exceeds half the period");
}

GridFunction lax_oleinik_step(const Model& m, const GridFunction& discount_field,
                              const GridFunction& f, double c, const SchemeParams& sp) {
    if (!discount_field.grid.same_as(f.grid))
        throw std::invalid_argument("lax_oleinik_step: grid mismatch");
    const Grid& g = f.grid;
    GridFunction out{g, std::vector<double>(static_cast<size_t>(g.points))};
    for (int i = 0; i < g.points; ++i) {
        double x = g.node(i);
        double d = discount_field.values[static_cast<size_t>(i)];
        double best = 1e300;
        for (double v : sp.vgrid.v) {
            double cand = interp(f, x - sp.tau * v) + sp.tau * (m.lagrangian(x, v, d) + c);
            if (cand < best) best = cand;
        }
        out.values[static_cast<size_t>(i)] = best;
    }
    return out;
}

namespace {

// one-more-step residual at the current iterate
double step_residual(const Model& m, double lambda, const GridFunction& u, double c,
                     const SchemeParams& sp) {
    GridFunction lam_u = u;
    for (double& v : lam_u.values) v *= lambda;
    GridFunction tu = lax_oleinik_step(m, lam_u, u, c, sp);
    return sup_dist(u, tu);
}

struct Policy {
    std::vector<int> vidx;      // chosen velocity index per node
    std::vector<int> foot;      // left interpolation node of x - tau v
    std::vector<double> theta;  // interpolation weight of foot+1
};

Policy improve_policy(const Model& m, double lambda, const GridFunction& u, double c,
                      const SchemeParams& sp) {
    const Grid& g = u.grid;
    Policy pol;
    pol.vidx.resize(static_cast<size_t>(g.points));
    pol.foot.resize(static_cast<size_t>(g.points));
    pol.theta.resize(static_cast<size_t>(g.points));
    for (int i = 0; i < g.points; ++i) {
        double x = g.node(i);
        double d = lambda * u.values[static_cast<size_t>(i)];
        double best = 1e300;
        int bj = 0;
        for (int j = 0; j < sp.vgrid.count; ++j) {
            double v = sp.vgrid.v[static_cast<size_t>(j)];
            double cand = interp(u, x - sp.tau * v) + sp.tau * (m.lagrangian(x, v, d) + c);
            if (cand < best) {
                best = cand;
                bj = j;
            }
        }
        pol.vidx[static_cast<size_t>(i)] = bj;
        double xr = g.wrap_x(x - sp.tau * sp.vgrid.v[static_cast<size_t>(bj)]);
        int a = static_cast<int>(std::floor(xr / g.spacing));
        if (a >= g.points) a = g.points - 1;
        pol.foot[static_cast<size_t>(i)] = a;
        pol.theta[static_cast<size_t>(i)] = (xr - a * g.spacing) / g.spacing;
    }
    return pol;
}

// exact fixed point of the frozen-policy affine update; empty on failure
bool evaluate_policy_affine(const Model& m, double lambda, double c, const SchemeParams& sp,
                            const Policy& pol, GridFunction& u) {
    const Grid& g = u.grid;
    const int n = g.points;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        double x = g.node(i);
        double v = sp.vgrid.v[static_cast<size_t>(pol.vidx[static_cast<size_t>(i)])];
        double gi = m.dLdu0(x, v);
        int a = pol.foot[static_cast<size_t>(i)];
        int a1 = g.wrap_index(a + 1);
        double th = pol.theta[static_cast<size_t>(i)];
        A(i, i) += 1.0 - sp.tau * lambda * gi;
        A(i, a) -= 1.0 - th;
        A(i, a1) -= th;
        b(i) = sp.tau * (m.lagrangian(x, v, 0.0) + c);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd sol = lu.solve(b);
    double err = (A * sol - b).cwiseAbs().maxCoeff();
    if (!sol.allFinite() || err > 1e-7 * (1.0 + sol.cwiseAbs().maxCoeff())) return false;
    for (int i = 0; i < n; ++i) u.values[static_cast<size_t>(i)] = sol(i);
    return true;
}

}  // namespace

DiscountedSolution solve_discounted(const Model& m, double lambda, double c,
                                    const SchemeParams& sp, const GridFunction& init,
                                    std::optional<int> anchor) {
    validate_scheme(sp, init.grid);
    if (lambda < 0.0) throw std::invalid_argument("solve_discounted: lambda must be >= 0");

    DiscountedSolution sol;
    sol.lambda = lambda;
    sol.c = c;
    sol.u = init;
    const Grid& g = init.grid;

    if (lambda == 0.0) {
        if (!anchor) throw std::invalid_argument("solve_discounted: unanchored critical solve");
        int ai = g.wrap_index(*anchor);
        GridFunction zero = make_constant(g, 0.0);
        double shift0 = sol.u.values[static_cast<size_t>(ai)];
        for (double& v : sol.u.values) v -= shift0;
        double damping = sp.damping;
        double prev_res = 1e300;
        int worse_streak = 0;
        for (int it = 0; it < sp.max_iter; ++it) {
            GridFunction tu = lax_oleinik_step(m, zero, sol.u, c, sp);
            double sh = tu.values[static_cast<size_t>(ai)];
            for (double& v : tu.values) v -= sh;
            double res = sup_dist(sol.u, tu);
            sol.iterations = it + 1;
            sol.residual = res;
            for (size_t k = 0; k < sol.u.values.size(); ++k)
                sol.u.values[k] = (1.0 - damping) * sol.u.values[k] + damping * tu.values[k];
            if (res <= sp.tol) {
                sol.converged = true;
                return sol;
            }
            if (res > prev_res * (1.0 + 1e-12)) {
                if (++worse_streak >= 2 && damping > 0.05) {
                    damping *= 0.5;
                    worse_streak = 0;
                }
            } else {
                worse_streak = 0;
            }
            prev_res = res;
        }
        sol.message = "max_iter exceeded";
        return sol;
    }

    int iters = 0;
    bool accel = m.affine_in_u && static_cast<bool>(m.dLdu0) && g.points <= 4096;
    if (accel) {
        // The one-step residual is not monotone along policy iteration (the first
        // evaluated iterate can jump several orders of magnitude from a cold
        // start), so keep iterating from the evaluated point and only give up
        // after a few rounds without a clear new best.
        double best_res = 1e300;
        int no_gain = 0;
        for (int round = 0; round < 100; ++round) {
            Policy pol = improve_policy(m, lambda, sol.u, c, sp);
            GridFunction u_try = sol.u;
            if (!evaluate_policy_affine(m, lambda, c, sp, pol, u_try)) break;
            double r_try = step_residual(m, lambda, u_try, c, sp);
            ++iters;
            sol.u = u_try;
            if (r_try <= sp.tol) {
                sol.iterations = iters;
                sol.residual = r_try;
                sol.converged = true;
                return sol;
            }
            if (r_try < 0.9 * best_res) {
                best_res = r_try;
                no_gain = 0;
            } else if (++no_gain >= 3) {
                break;  // degenerate coupling: fall back to plain iteration
            }
        }
    }

    double damping = sp.damping;
    double prev_res = 1e300;
    int worse_streak = 0;
    for (; iters < sp.max_iter; ++iters) {
        GridFunction lam_u = sol.u;
        for (double& v : lam_u.values) v *= lambda;
        GridFunction tu = lax_oleinik_step(m, lam_u, sol.u, c, sp);
        double res = sup_dist(sol.u, tu);
        sol.iterations = iters + 1;
        sol.residual = res;
        if (res <= sp.tol) {
            sol.converged = true;
            return sol;
        }
        for (size_t k = 0; k < sol.u.values.size(); ++k)
            sol.u.values[k] = (1.0 - damping) * sol.u.values[k] + damping * tu.values[k];
        if (res > prev_res * (1.0 + 1e-12)) {
            if (++worse_streak >= 2 && damping > 0.05) {
                damping *= 0.5;
                worse_streak = 0;
            }
        } else {
            worse_streak = 0;
        }
        prev_res = res;
    }
    sol.message = "max_iter exceeded";
    return sol;
}

const DiscountedSolution& require_converged(const DiscountedSolution& sol) {
    if (!sol.converged)
        throw std::runtime_error("solve_discounted: " +
                                 (sol.message.empty() ? std::string("not converged") : sol.message) +
                                 " (residual " + std::to_string(sol.residual) + ")");
    return sol;
}

std::vector<GridFunction> finite_horizon_action(const Model& m, double r, int source_node,
                                                double horizon, double c,
                                                const SchemeParams& sp, const Grid& g,
                                                double big) {
    validate_scheme(sp, g);
    double kf = horizon / sp.tau;
    int k = static_cast<int>(std::lround(kf));
    if (std::fabs(kf - k) > 1e-9)
        throw std::invalid_argument("finite_horizon_action: horizon must be a multiple of tau");

    // freeze the model at u = r
    Model mr = m;
    auto L = m.lagrangian;
    mr.lagrangian = [L, r](double x, double v, double) { return L(x, v, r); };
    mr.dLdu0 = [](double, double) { return 0.0; };
    mr.affine_in_u = true;

    GridFunction zero = make_constant(g, 0.0);
    std::vector<GridFunction> iterates;
    iterates.reserve(static_cast<size_t>(k) + 1);
    GridFunction h = make_constant(g, big);
    h.values[static_cast<size_t>(g.wrap_index(source_node))] = 0.0;
    iterates.push_back(h);
    for (int step = 0; step < k; ++step) {
        h = lax_oleinik_step(mr, zero, h, c, sp);
        iterates.push_back(h);
    }
    return iterates;
}

DominationReport verify_domination(const Model& m, const DiscountedSolution& sol,
                                   const SchemeParams& sp, int trials, unsigned seed) {
    const Grid& g = sol.u.grid;
    DominationReport rep;
    rep.trials = trials;

    rep.worst_rest_slack = 1e300;
    for (int i = 0; i < g.points; ++i) {
        double x = g.node(i);
        double slack = sp.tau * (m.lagrangian(x, 0.0, sol.lambda * sol.u.values[static_cast<size_t>(i)]) + sol.c);
        rep.worst_rest_slack = std::min(rep.worst_rest_slack, slack);
    }
    rep.rest_curves_ok = rep.worst_rest_slack >= -10.0 * sp.tol - 1e-12;

    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> node_dist(0, g.points - 1);
    std::uniform_int_distribution<int> len_dist(5, 100);
    std::uniform_int_distribution<int> v_dist(0, sp.vgrid.count - 1);
    rep.worst_slack = 1e300;
    for (int t = 0; t < trials; ++t) {
        double x = g.node(node_dist(rng));
        double x0 = x;
        int len = len_dist(rng);
        double action = 0.0;
        for (int s = 0; s < len; ++s) {
            double v = sp.vgrid.v[static_cast<size_t>(v_dist(rng))];
            x = g.wrap_x(x + sp.tau * v);
            double u_here = interp(sol.u, x);
            action += sp.tau * (m.lagrangian(x, v, sol.lambda * u_here) + sol.c);
        }
        double slack = action - (interp(sol.u, x) - interp(sol.u, x0));
        rep.worst_slack = std::min(rep.worst_slack, slack);
    }
    return rep;
}

CalibratedPath backtrack_calibrated(const Model& m, const DiscountedSolution& sol,
                                    int start_node, int steps, const SchemeParams& sp) {
    const Grid& g = sol.u.grid;
    CalibratedPath path;
    double x = g.node(g.wrap_index(start_node));
    for (int k = 0; k < steps; ++k) {
        double u_here = interp(sol.u, x);
        double d = sol.lambda * u_here;
        double best = 1e300;
        double best_v = 0.0;
        for (double v : sp.vgrid.v) {
            double cand = interp(sol.u, x - sp.tau * v) + sp.tau * (m.lagrangian(x, v, d) + sol.c);
            // ties toward smaller |v|, then toward negative v
            if (cand < best - 1e-12 ||
                (cand < best + 1e-12 &&
                 (std::fabs(v) < std::fabs(best_v) - 1e-15 ||
                  (std::fabs(std::fabs(v) - std::fabs(best_v)) < 1e-15 && v < best_v)))) {
                best = cand;
                best_v = v;
            }
        }
        double action = sp.tau * (m.lagrangian(x, best_v, d) + sol.c);
        path.steps.push_back({-k * sp.tau, x, best_v, action});
        path.total_action += action;
        x = g.wrap_x(x - sp.tau * best_v);
    }
    return path;
}

OccupationMeasure build_discounted_occupation(const Model& m, const CalibratedPath& path,
                                              double lambda, const Grid& g,
                                              const VelocityGrid& vg, double tau) {
    if (path.steps.empty())
        throw std::invalid_argument("build_discounted_occupation: empty path");
    if (!(lambda > 0.0))
        throw std::invalid_argument("build_discounted_occupation: lambda must be positive");

    OccupationMeasure mu = make_zero_measure(g, vg);
    mu.origin = "discounted occupation";
    double exponent = 0.0;  // lambda * integral over later (more recent) steps of dL/du
    double total = 0.0;
    std::vector<double> w(path.steps.size());
    for (size_t k = 0; k < path.steps.size(); ++k) {
        w[k] = std::exp(exponent);
        total += w[k];
        exponent += lambda * tau * partial_L_u0(m, path.steps[k].position, path.steps[k].velocity);
    }
    if (!(total > 1e-300))
        throw std::runtime_error("build_discounted_occupation: degenerate normalization");

    for (size_t k = 0; k < path.steps.size(); ++k) {
        const auto& s = path.steps[k];
        // locate the velocity index (backtracking always picks grid velocities)
        int vj = 0;
        double bestd = 1e300;
        for (int j = 0; j < vg.count; ++j) {
            double d = std::fabs(vg.v[static_cast<size_t>(j)] - s.velocity);
            if (d < bestd) {
                bestd = d;
                vj = j;
            }
        }
        double xr = g.wrap_x(s.position);
        int a = static_cast<int>(std::floor(xr / g.spacing));
        if (a >= g.points) a = g.points - 1;
        double th = (xr - a * g.spacing) / g.spacing;
        mu.at(a, vj) += (1.0 - th) * w[k] / total;
        mu.at(g.wrap_index(a + 1), vj) += th * w[k] / total;
    }
    return mu;
}

}  // namespace wkam

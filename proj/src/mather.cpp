#include "wkam/mather.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace wkam {

ClosedMeasurePolytope build_polytope(const Grid& g, const VelocityGrid& vg, double tau) {
    if (tau * vg.vmax > 0.5 * g.period)
        throw std::invalid_argument("build_polytope: tau*vmax exceeds half the period");
    ClosedMeasurePolytope p;
    p.grid = g;
    p.vgrid = vg;
    p.tau = tau;
    p.base.rows = g.points + 1;
    p.base.rhs.assign(static_cast<size_t>(g.points + 1), 0.0);
    p.base.rhs[static_cast<size_t>(g.points)] = 1.0;  // total mass

    for (int i = 0; i < g.points; ++i) {
        double x = g.node(i);
        for (int j = 0; j < vg.count; ++j) {
            double v = vg.v[static_cast<size_t>(j)];
            p.base.add_var(0.0);
            auto& col = p.base.cols.back();
            // closure: (phi_k(x - tau v) - phi_k(x)) / tau, hat basis at every node
            std::map<int, double> coeffs;
            double xr = g.wrap_x(x - tau * v);
            int a = static_cast<int>(std::floor(xr / g.spacing));
            if (a >= g.points) a = g.points - 1;
            double th = (xr - a * g.spacing) / g.spacing;
            coeffs[a] += (1.0 - th) / tau;
            coeffs[g.wrap_index(a + 1)] += th / tau;
            coeffs[i] -= 1.0 / tau;
            for (const auto& [row, cval] : coeffs)
                if (std::fabs(cval) > 1e-15) col.emplace_back(row, cval);
            col.emplace_back(g.points, 1.0);  // mass row
        }
    }
    return p;
}

namespace {

std::vector<double> lagrangian_costs(const ClosedMeasurePolytope& p, const Model& m, double r) {
    std::vector<double> cost(static_cast<size_t>(p.num_vars()));
    for (int i = 0; i < p.grid.points; ++i) {
        double x = p.grid.node(i);
        for (int j = 0; j < p.vgrid.count; ++j)
            cost[static_cast<size_t>(i * p.vgrid.count + j)] =
                m.lagrangian(x, p.vgrid.v[static_cast<size_t>(j)], r);
    }
    return cost;
}

OccupationMeasure measure_from_lp(const ClosedMeasurePolytope& p, const std::vector<double>& x,
                                  const std::string& origin) {
    OccupationMeasure mu = make_zero_measure(p.grid, p.vgrid);
    mu.origin = origin;
    for (int k = 0; k < p.num_vars(); ++k)
        mu.weights[static_cast<size_t>(k)] = std::max(0.0, x[static_cast<size_t>(k)]);
    return mu;
}

}  // namespace

MatherResult solve_mather_lp(const ClosedMeasurePolytope& p, const Model& m, double r) {
    SparseLP lp = p.base;
    lp.cost = lagrangian_costs(p, m, r);
    SimplexResult sr = solve_lp(lp);
    if (sr.status != SimplexResult::Status::optimal)
        throw std::runtime_error("solve_mather_lp: LP did not reach optimality (internal error)");
    MatherResult res;
    res.value = sr.objective;
    res.mu = measure_from_lp(p, sr.x, "mather lp " + m.label);
    res.lp = std::move(sr);
    return res;
}

FaceResult optimal_face_optimize(const ClosedMeasurePolytope& p, const Model& m, double r,
                                 const MatherResult& lp_result,
                                 const std::vector<double>& objective, OptSense sense,
                                 double face_tol) {
    if (static_cast<int>(objective.size()) != p.num_vars())
        throw std::invalid_argument("optimal_face_optimize: objective size mismatch");
    const double lp_value = lp_result.value;
    if (face_tol < 0.0) face_tol = 1e-7 * (1.0 + std::fabs(lp_value));

    SparseLP lp = p.base;
    std::vector<double> lcost = lagrangian_costs(p, m, r);
    const int face_row = lp.rows;
    lp.rows += 1;
    lp.rhs.push_back(lp_value + face_tol);
    double sgn = sense == OptSense::maximize ? -1.0 : 1.0;
    for (int k = 0; k < p.num_vars(); ++k) {
        lp.cost[static_cast<size_t>(k)] = sgn * objective[static_cast<size_t>(k)];
        if (std::fabs(lcost[static_cast<size_t>(k)]) > 0.0)
            lp.cols[static_cast<size_t>(k)].emplace_back(face_row, lcost[static_cast<size_t>(k)]);
    }
    lp.add_var(0.0);  // slack of the face constraint
    lp.cols.back().emplace_back(face_row, 1.0);

    // The feasible set is the epsilon-optimal face itself, so a cold phase 1
    // would have to re-solve the Mather LP just to find a feasible point.
    // The Mather optimal basis plus the face slack is already feasible here.
    SimplexOptions opt;
    const int n = p.num_vars();
    if (static_cast<int>(lp_result.lp.basis.size()) == p.base.rows) {
        for (int e : lp_result.lp.basis)
            opt.warm_basis.push_back(e < n ? e : (n + 1) + (e - n));
        opt.warm_basis.push_back(n);  // face slack carries the face row
    }
    SimplexResult sr = solve_lp(lp, opt);
    FaceResult out;
    if (sr.status == SimplexResult::Status::infeasible) {
        out.feasible = false;
        return out;
    }
    if (sr.status != SimplexResult::Status::optimal)
        throw std::runtime_error("optimal_face_optimize: LP did not reach optimality");
    out.value = sgn * sr.objective;
    sr.x.resize(static_cast<size_t>(p.num_vars()));  // drop the slack
    out.mu = measure_from_lp(p, sr.x, "face optimum " + m.label);
    return out;
}

L4Report check_L4(const ClosedMeasurePolytope& p, const Model& m,
                  const MatherResult& lp_result, double margin) {
    std::vector<double> obj(static_cast<size_t>(p.num_vars()));
    for (int i = 0; i < p.grid.points; ++i) {
        double x = p.grid.node(i);
        for (int j = 0; j < p.vgrid.count; ++j)
            obj[static_cast<size_t>(i * p.vgrid.count + j)] =
                partial_L_u0(m, x, p.vgrid.v[static_cast<size_t>(j)]);
    }
    FaceResult fr = optimal_face_optimize(p, m, 0.0, lp_result, obj, OptSense::maximize);
    if (!fr.feasible) throw std::runtime_error("check_L4: optimal face infeasible");
    L4Report rep;
    rep.mather_optimum = lp_result.value;
    rep.face_max_dLdu = fr.value;
    if (fr.value <= -margin)
        rep.verdict = "holds";
    else if (fr.value <= -0.5 * margin)
        rep.verdict = "marginal";
    else
        rep.verdict = "fails";
    return rep;
}

const GridFunction& BarrierTable::row(int source_node) const {
    for (size_t k = 0; k < sources.size(); ++k)
        if (sources[k] == source_node) return values[k];
    throw std::invalid_argument("BarrierTable: source " + std::to_string(source_node) +
                                " not in table");
}

bool BarrierTable::has_source(int source_node) const {
    return std::find(sources.begin(), sources.end(), source_node) != sources.end();
}

BarrierTable peierls_barrier(const Model& m, const std::vector<int>& sources, double c,
                             double t1, double t2, const SchemeParams& sp, const Grid& g,
                             double osc_tol) {
    if (!(t1 < t2)) throw std::invalid_argument("peierls_barrier: need T1 < T2");
    int k1 = static_cast<int>(std::lround(t1 / sp.tau));
    int k2 = static_cast<int>(std::lround(t2 / sp.tau));
    if (std::fabs(t1 / sp.tau - k1) > 1e-9 || std::fabs(t2 / sp.tau - k2) > 1e-9)
        throw std::invalid_argument("peierls_barrier: T1, T2 must be multiples of tau");

    BarrierTable bt;
    bt.grid = g;
    bt.t1 = t1;
    bt.t2 = t2;
    bt.tau = sp.tau;

    GridFunction zero = make_constant(g, 0.0);
    Model m0 = m;  // frozen at 0 by passing discount field 0 below
    for (int s : sources) {
        auto iters = finite_horizon_action(m, 0.0, s, t2, c, sp, g);
        GridFunction h = iters[static_cast<size_t>(k1)];
        GridFunction hmax = h;
        for (int k = k1 + 1; k <= k2; ++k) {
            for (int i = 0; i < g.points; ++i) {
                double v = iters[static_cast<size_t>(k)].values[static_cast<size_t>(i)];
                h.values[static_cast<size_t>(i)] = std::min(h.values[static_cast<size_t>(i)], v);
                hmax.values[static_cast<size_t>(i)] = std::max(hmax.values[static_cast<size_t>(i)], v);
            }
        }
        double osc = sup_dist(h, hmax);
        GridFunction th = lax_oleinik_step(m0, zero, h, c, sp);
        bt.sources.push_back(g.wrap_index(s));
        bt.values.push_back(h);
        bt.fixed_point_residual.push_back(sup_dist(h, th));
        bt.window_oscillation.push_back(osc);
        if (osc > 10.0 * osc_tol) bt.window_ok = false;  // liminf window too small
    }
    return bt;
}

std::vector<int> aubry_set(const BarrierTable& bt, double tol) {
    std::vector<int> out;
    for (size_t k = 0; k < bt.sources.size(); ++k) {
        int s = bt.sources[k];
        if (bt.values[k].values[static_cast<size_t>(s)] <= tol) out.push_back(s);
    }
    return out;
}

void write_csv(const BarrierTable& bt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "source,target,h\n";
    out.precision(17);
    for (size_t k = 0; k < bt.sources.size(); ++k) {
        double xs = bt.grid.node(bt.sources[k]);
        for (int i = 0; i < bt.grid.points; ++i)
            out << xs << "," << bt.grid.node(i) << ","
                << bt.values[k].values[static_cast<size_t>(i)] << "\n";
    }
}

std::vector<int> face_support_nodes(const ClosedMeasurePolytope& p, const Model& m,
                                    const MatherResult& lp_result, double mass_cap) {
    // One LP answers "which nodes can carry face mass" for every node at once:
    // maximize sum_i s_i over near-optimal closed measures, with s_i capped by
    // both the mass the measure puts at node i and mass_cap. The face polytope
    // is convex, so a mixture of per-node maximizers realizes all carryable
    // nodes simultaneously and each such node reaches its cap.
    const int P = p.grid.points;
    const int n = p.num_vars();
    const double face_tol = 1e-7 * (1.0 + std::fabs(lp_result.value));
    std::vector<double> lcost = lagrangian_costs(p, m, 0.0);

    SparseLP lp = p.base;
    const int face_row = lp.rows;
    const int spread0 = face_row + 1;  // sum_j mu_ij - s_i - w_i = 0
    const int cap0 = spread0 + P;      // s_i + t_i = mass_cap
    lp.rows += 1 + 2 * P;
    lp.rhs.resize(static_cast<size_t>(lp.rows), 0.0);
    lp.rhs[static_cast<size_t>(face_row)] = lp_result.value + face_tol;
    for (int i = 0; i < P; ++i) lp.rhs[static_cast<size_t>(cap0 + i)] = mass_cap;
    for (int k = 0; k < n; ++k) {
        if (std::fabs(lcost[static_cast<size_t>(k)]) > 0.0)
            lp.cols[static_cast<size_t>(k)].emplace_back(face_row, lcost[static_cast<size_t>(k)]);
        lp.cols[static_cast<size_t>(k)].emplace_back(spread0 + k / p.vgrid.count, 1.0);
    }
    lp.add_var(0.0);  // face slack
    lp.cols.back().emplace_back(face_row, 1.0);
    std::vector<int> svar(static_cast<size_t>(P));
    for (int i = 0; i < P; ++i) {
        lp.add_var(-1.0);  // s_i, rewarded
        svar[static_cast<size_t>(i)] = lp.num_vars() - 1;
        lp.cols.back().emplace_back(spread0 + i, -1.0);
        lp.cols.back().emplace_back(cap0 + i, 1.0);
        lp.add_var(0.0);  // w_i, surplus node mass above s_i
        lp.cols.back().emplace_back(spread0 + i, -1.0);
        lp.add_var(0.0);  // t_i, slack of the cap
        lp.cols.back().emplace_back(cap0 + i, 1.0);
    }

    // Warm start from the Mather optimal basis: together with the face slack,
    // the surplus w_i on each spread row and the cap slack t_i it forms a
    // primal feasible basis, so phase 1 is skipped.
    SimplexOptions opt;
    if (static_cast<int>(lp_result.lp.basis.size()) == p.base.rows) {
        const int n_total = lp.num_vars();
        for (int e : lp_result.lp.basis)
            opt.warm_basis.push_back(e < n ? e : n_total + (e - n));
        opt.warm_basis.push_back(n);  // face slack
        for (int i = 0; i < P; ++i) {
            opt.warm_basis.push_back(svar[static_cast<size_t>(i)] + 1);  // w_i
            opt.warm_basis.push_back(svar[static_cast<size_t>(i)] + 2);  // t_i
        }
    }
    SimplexResult sr = solve_lp(lp, opt);
    if (sr.status != SimplexResult::Status::optimal)
        throw std::runtime_error("face_support_nodes: auxiliary LP did not reach optimality");
    std::vector<bool> carry(static_cast<size_t>(P), false);
    for (int i = 0; i < P; ++i)
        if (sr.x[static_cast<size_t>(svar[static_cast<size_t>(i)])] >= 0.5 * mass_cap)
            carry[static_cast<size_t>(i)] = true;
    // the computed optimum itself always counts, even below the cap
    for (auto [node, vidx] : lp_result.mu.support()) carry[static_cast<size_t>(node)] = true;
    std::vector<int> nodes;
    for (int i = 0; i < P; ++i)
        if (carry[static_cast<size_t>(i)]) nodes.push_back(i);
    return nodes;
}

GridFunction select_u0(const ClosedMeasurePolytope& p, const Model& m,
                       const MatherResult& lp_result, const L4Report& l4,
                       const BarrierTable& bt, const SelectU0Options& opts) {
    if (!l4.holds())
        throw std::runtime_error("select_u0: refused, (L4) verdict is '" + l4.verdict +
                                 "' (denominator may vanish on the face)");
    double face_tol = opts.face_tol;
    if (face_tol < 0.0) face_tol = 1e-7 * (1.0 + std::fabs(lp_result.value));

    // Only columns at the barrier-source nodes can carry face mass (the table
    // is built on face_support_nodes, which certifies exactly that), so the
    // node LPs below stay small whenever the face support is local.
    std::vector<int> keep;
    for (int k = 0; k < p.num_vars(); ++k)
        if (bt.has_source(k / p.vgrid.count) ||
            lp_result.mu.weights[static_cast<size_t>(k)] > 1e-9)
            keep.push_back(k);

    std::vector<double> lcost = lagrangian_costs(p, m, 0.0);
    std::vector<double> gvals(keep.size());
    std::vector<int> keep_node(keep.size());
    for (size_t t = 0; t < keep.size(); ++t) {
        int k = keep[t];
        int i = k / p.vgrid.count;
        int j = k % p.vgrid.count;
        keep_node[t] = i;
        gvals[t] = partial_L_u0(m, p.grid.node(i), p.vgrid.v[static_cast<size_t>(j)]);
        if (!bt.has_source(i))
            throw std::invalid_argument("select_u0: barrier table is missing face source node " +
                                        std::to_string(i));
    }

    const int P = p.grid.points;
    // Closure rows untouched by kept columns are trivially satisfied; drop
    // them so each node LP stays small when the face support is local.
    std::vector<int> row_map(static_cast<size_t>(P), -1);
    int R = 0;
    for (int k : keep)
        for (const auto& [row, a] : p.base.cols[static_cast<size_t>(k)])
            if (row < P && row_map[static_cast<size_t>(row)] < 0)
                row_map[static_cast<size_t>(row)] = R++;

    // Charnes-Cooper system: closure rows, mass-link, denominator = -1, face row
    SparseLP cc;
    cc.rows = R + 3;
    cc.rhs.assign(static_cast<size_t>(R + 3), 0.0);
    cc.rhs[static_cast<size_t>(R + 1)] = -1.0;
    for (size_t t = 0; t < keep.size(); ++t) {
        int k = keep[t];
        cc.add_var(0.0);
        auto& col = cc.cols.back();
        for (const auto& [row, a] : p.base.cols[static_cast<size_t>(k)]) {
            if (row < P)
                col.emplace_back(row_map[static_cast<size_t>(row)], a);  // closure
            else
                col.emplace_back(R, a);  // mass-link: sum y - t = 0
        }
        if (std::fabs(gvals[t]) > 0.0) col.emplace_back(R + 1, gvals[t]);
        if (std::fabs(lcost[static_cast<size_t>(k)]) > 0.0)
            col.emplace_back(R + 2, lcost[static_cast<size_t>(k)]);
    }
    cc.add_var(0.0);  // t
    cc.cols.back().emplace_back(R, -1.0);
    cc.cols.back().emplace_back(R + 2, -(lp_result.value + face_tol));
    cc.add_var(0.0);  // slack of the face row
    cc.cols.back().emplace_back(R + 2, 1.0);

    GridFunction u0{p.grid, std::vector<double>(static_cast<size_t>(P))};
    for (int x = 0; x < P; ++x) {
        for (size_t t = 0; t < keep.size(); ++t) {
            const GridFunction& hrow = bt.row(keep_node[t]);
            cc.cost[t] = -hrow.values[static_cast<size_t>(x)] * gvals[t];
        }
        SimplexResult sr = solve_lp(cc);
        if (sr.status != SimplexResult::Status::optimal)
            throw std::runtime_error("select_u0: node LP failed at node " + std::to_string(x));
        u0.values[static_cast<size_t>(x)] = sr.objective;
    }
    return u0;
}

LargestSubsolutionReport verify_largest_subsolution(
    const GridFunction& u0, const Model& m, const ClosedMeasurePolytope& p,
    const MatherResult& lp_result, const BarrierTable& bt, double c,
    const SchemeParams& sp, double tol, double delta) {
    LargestSubsolutionReport rep;

    // (i) discrete subsolution: one-step domination residual
    GridFunction zero = make_constant(u0.grid, 0.0);
    GridFunction tu = lax_oleinik_step(m, zero, u0, c, sp);
    rep.min_onestep_slack = 1e300;
    for (size_t i = 0; i < u0.values.size(); ++i)
        rep.min_onestep_slack = std::min(rep.min_onestep_slack, tu.values[i] - u0.values[i]);
    rep.subsolution_ok = rep.min_onestep_slack >= -tol;

    // (ii) face constraint: min over the face of integral of u0 dL/du
    auto weighted_obj = [&](const GridFunction& w) {
        std::vector<double> obj(static_cast<size_t>(p.num_vars()));
        for (int i = 0; i < p.grid.points; ++i) {
            double x = p.grid.node(i);
            double wx = interp(w, x);
            for (int j = 0; j < p.vgrid.count; ++j)
                obj[static_cast<size_t>(i * p.vgrid.count + j)] =
                    wx * partial_L_u0(m, x, p.vgrid.v[static_cast<size_t>(j)]);
        }
        return obj;
    };
    FaceResult f0 = optimal_face_optimize(p, m, 0.0, lp_result, weighted_obj(u0),
                                          OptSense::minimize);
    rep.face_min_weighted = f0.value;
    rep.constraint_ok = f0.value >= -tol;

    GridFunction shifted_u = u0;
    for (double& v : shifted_u.values) v += delta;
    FaceResult fs = optimal_face_optimize(p, m, 0.0, lp_result, weighted_obj(shifted_u),
                                          OptSense::minimize);
    rep.shifted_face_min = fs.value;
    rep.shifted_violates = fs.value < -tol;

    // barrier envelope over the available sources: u0 should already coincide
    // with the envelope of its own source values
    rep.envelope_gap = 0.0;
    for (int i = 0; i < u0.grid.points; ++i) {
        double env = 1e300;
        for (size_t k = 0; k < bt.sources.size(); ++k) {
            int y = bt.sources[k];
            env = std::min(env, u0.values[static_cast<size_t>(y)] +
                                    bt.values[k].values[static_cast<size_t>(i)]);
        }
        rep.envelope_gap = std::max(rep.envelope_gap, env - u0.values[static_cast<size_t>(i)]);
    }
    rep.is_largest = rep.subsolution_ok && rep.constraint_ok && rep.shifted_violates;
    return rep;
}

}  // namespace wkam

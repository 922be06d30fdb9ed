#include "wkam/critical.hpp"

#include <cmath>
#include <stdexcept>

namespace wkam {

CriticalValue critical_value_ergodic(const Model& m, double r, const SchemeParams& sp,
                                     const Grid& g, const std::vector<double>& ladder) {
    if (ladder.size() < 2)
        throw std::invalid_argument("critical_value_ergodic: need at least two ladder entries");

    // linear-discount wrapper around the frozen Hamiltonian H^r
    Model w;
    w.period = m.period;
    w.label = "ergodic(" + m.label + ")";
    auto H = m.hamiltonian;
    auto L = m.lagrangian;
    w.hamiltonian = [H, r](double x, double p, double u) { return H(x, p, r) + u; };
    w.lagrangian = [L, r](double x, double v, double u) { return L(x, v, r) - u; };
    w.dLdu0 = [](double, double) { return -1.0; };
    w.affine_in_u = true;

    CriticalValue cv;
    cv.method = "ergodic";
    GridFunction u = make_constant(g, 0.0);
    for (double lam : ladder) {
        auto sol = solve_discounted(w, lam, 0.0, sp, u);
        require_converged(sol);
        u = sol.u;  // warm start for the next rung
        double mean = 0.0;
        for (double uv : sol.u.values) mean += uv;
        mean /= sol.u.values.size();
        cv.ladder.emplace_back(lam, -lam * mean);
    }
    for (size_t k = 0; k + 2 < cv.ladder.size(); ++k) {
        double d1 = cv.ladder[k + 1].second - cv.ladder[k].second;
        double d2 = cv.ladder[k + 2].second - cv.ladder[k + 1].second;
        if (d1 * d2 < -1e-12) cv.monotone_trend = false;  // non-monotone lambda trend
    }
    // Richardson on successive halvings: v(lambda) ~ c + a*lambda
    std::vector<double> extrap;
    for (size_t k = 0; k + 1 < cv.ladder.size(); ++k) {
        double l1 = cv.ladder[k].first, v1 = cv.ladder[k].second;
        double l2 = cv.ladder[k + 1].first, v2 = cv.ladder[k + 1].second;
        extrap.push_back(v2 + l2 * (v2 - v1) / (l1 - l2));
    }
    cv.value = extrap.back();
    double spread = 0.0;
    for (double e : extrap) spread = std::max(spread, std::fabs(e - cv.value));
    spread = std::max(spread, std::fabs(cv.ladder.back().second - cv.value));
    cv.estimated_error = spread;
    return cv;
}

CriticalValue critical_value_lp(const ClosedMeasurePolytope& p, const Model& m, double r) {
    MatherResult mr = solve_mather_lp(p, m, r);
    CriticalValue cv;
    cv.method = "lp";
    cv.value = -mr.value;
    cv.estimated_error = std::max(mr.lp.constraint_residual, 1e-12);
    return cv;
}

double find_c0(const ClosedMeasurePolytope& p, const Model& m,
               std::pair<double, double> bracket, double tol) {
    auto c_of = [&](double r) {
        // freeze u = r inside the model before taking the LP critical value
        return critical_value_lp(p, m, r).value;
    };
    double lo = bracket.first, hi = bracket.second;
    double clo = c_of(lo), chi = c_of(hi);
    if (!(clo < 0.0 && chi > 0.0))
        throw std::invalid_argument("find_c0: bracket invalid (need c(low) < 0 < c(high))");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double cm = c_of(mid);
        if (std::fabs(cm) <= tol) return mid;
        if (cm < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * (1.0 + std::fabs(hi))) return 0.5 * (lo + hi);
    }
    return 0.5 * (lo + hi);
}

}  // namespace wkam

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wkam/mather.hpp"
#include "wkam/model.hpp"
#include "wkam/solver.hpp"

namespace wkam {

struct CriticalValue {
    double value{0.0};
    std::string method;  // "ergodic" or "lp"
    double estimated_error{0.0};
    std::vector<std::pair<double, double>> ladder;  // (lambda, -lambda*mean u) for ergodic
    bool monotone_trend{true};
};

/// Critical value of H(x, p, r) by the vanishing-discount route: solve the
/// linearly discounted equation lambda*u + H^r(x, u') = 0 on a lambda ladder
/// and Richardson-extrapolate -lambda * (node mean of u).
CriticalValue critical_value_ergodic(const Model& m, double r, const SchemeParams& sp,
                                     const Grid& g,
                                     const std::vector<double>& ladder = {1e-2, 5e-3, 2.5e-3});

/// Critical value as minus the minimum of the Lagrangian integral over the
/// discrete closed-measure polytope.
CriticalValue critical_value_lp(const ClosedMeasurePolytope& p, const Model& m, double r);

/// Bisection for the shift c0 with c(H^{c0}) = 0; the map r -> c(H^r) is
/// non-decreasing. Requires c(low) < 0 < c(high); throws "bracket invalid".
double find_c0(const ClosedMeasurePolytope& p, const Model& m,
               std::pair<double, double> bracket, double tol);

}  // namespace wkam

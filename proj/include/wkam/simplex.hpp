#pragma once

#include <utility>
#include <vector>

namespace wkam {

/// min cost . x  subject to  A x = rhs, x >= 0, with A stored by columns.
struct SparseLP {
    int rows{0};
    std::vector<double> rhs;
    std::vector<double> cost;
    std::vector<std::vector<std::pair<int, double>>> cols;  // (row, coeff) per variable

    int num_vars() const { return static_cast<int>(cols.size()); }
    void add_var(double c) {
        cost.push_back(c);
        cols.emplace_back();
    }
};

struct SimplexOptions {
    int max_iter{500000};
    double tol{1e-9};
    int refactor_every{512};
    /// consecutive degenerate pivots before switching to Bland's rule
    int bland_after{50};
    /// smallest acceptable pivot magnitude in the ratio test
    double pivot_tol{1e-9};
    /// relative scale of the deterministic right-hand-side perturbation
    /// b -> b + A q, q >= 0, used to break primal degeneracy (0 disables).
    /// The perturbation lies in the column space, so feasibility and row
    /// consistency are preserved; the true rhs is restored before the
    /// solution is extracted.
    double rhs_perturb{1e-7};
    /// optional starting basis (one column index per row; index >= num_vars
    /// means the artificial of row index - num_vars). If it is primal
    /// feasible after factorization, phase 1 is skipped; otherwise the solve
    /// silently falls back to the all-artificial start.
    std::vector<int> warm_basis;
};

struct SimplexResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status{Status::iteration_limit};
    double objective{0.0};
    std::vector<double> x;
    std::vector<double> dual;     // row multipliers at optimum
    std::vector<double> reduced;  // reduced cost per structural variable
    int iterations{0};
    double constraint_residual{0.0};  // max |A x - rhs| at the returned point
    /// final basis (one column index per row; >= num_vars: artificial of row
    /// index - num_vars); reusable as warm_basis for a closely related LP
    std::vector<int> basis;
};

/// Two-phase revised simplex. Devex pricing with a Bland's-rule fallback
/// on degeneracy streaks, so the solve is deterministic and cycle-free.
SimplexResult solve_lp(const SparseLP& lp, const SimplexOptions& opt = {});

}  // namespace wkam

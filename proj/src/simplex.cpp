#include "wkam/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <stdexcept>

namespace wkam {

namespace {

constexpr double kKickTol = 1e-7;   // pivot floor for zero-level artificial kicks
constexpr double kTrustTol = 1e-6;  // pivots below this trigger a fresh factorization

// deterministic pseudo-random weight in [0, 1) (golden-ratio hash)
double hash01(int j) {
    double v = 0.618033988749895 * (j + 1);
    return v - std::floor(v);
}

class RevisedSimplex {
public:
    RevisedSimplex(const SparseLP& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
        m_ = lp.rows;
        n_ = lp.num_vars();
        // perturb the rhs inside the column space: shifting each variable by a
        // tiny deterministic q_j >= 0 keeps the system feasible and consistent
        // while making basic solutions generically nondegenerate, which stops
        // the long zero-step walks these polytopes otherwise trigger
        std::vector<double> rhs_p = lp.rhs;
        if (opt.rhs_perturb > 0.0) {
            double bscale = 0.0;
            for (double v : lp.rhs) bscale = std::max(bscale, std::fabs(v));
            bscale = opt.rhs_perturb * (1.0 + bscale);
            for (int j = 0; j < n_; ++j) {
                double norm1 = 0.0;
                for (const auto& [r, a] : lp.cols[static_cast<size_t>(j)]) norm1 += std::fabs(a);
                if (norm1 == 0.0) continue;
                double qj = bscale * hash01(2 * j + 3) / norm1;
                for (const auto& [r, a] : lp.cols[static_cast<size_t>(j)])
                    rhs_p[static_cast<size_t>(r)] += a * qj;
            }
        }
        row_sign_.assign(static_cast<size_t>(m_), 1.0);
        b_.resize(m_);
        b_true_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            double bi = rhs_p[static_cast<size_t>(i)];
            if (bi < 0.0) {
                row_sign_[static_cast<size_t>(i)] = -1.0;
                bi = -bi;
            }
            b_(i) = bi;
            b_true_(i) = row_sign_[static_cast<size_t>(i)] * lp.rhs[static_cast<size_t>(i)];
        }
        basis_.resize(static_cast<size_t>(m_));
        for (int i = 0; i < m_; ++i) basis_[static_cast<size_t>(i)] = n_ + i;
        in_basis_.assign(static_cast<size_t>(n_ + m_), false);
        for (int j : basis_) in_basis_[static_cast<size_t>(j)] = true;
        Binv_ = Eigen::MatrixXd::Identity(m_, m_);
        xB_ = b_;
        try_warm_start(opt.warm_basis);
    }

    SimplexResult run() {
        SimplexResult res;
        if (!warm_ok_) {
            // phase 1: minimize the sum of artificials (deterministically
            // perturbed weights; the closure rows make the start maximally
            // degenerate)
            Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n_ + m_);
            for (int i = 0; i < m_; ++i) c1(n_ + i) = 1.0 + 1e-8 * hash01(i);
            auto st1 = iterate(c1, res.iterations, opt_.tol);
            if (st1 == SimplexResult::Status::iteration_limit) {
                res.status = st1;
                return res;
            }
            double infeas = 0.0;
            for (int i = 0; i < m_; ++i)
                if (basis_[static_cast<size_t>(i)] >= n_) infeas += xB_(i);
            if (infeas > 1e-7 * (1.0 + b_.cwiseAbs().maxCoeff())) {
                res.status = SimplexResult::Status::infeasible;
                return res;
            }
        }

        // phase 2: tiny deterministic cost perturbation to break the ties that
        // drive long degenerate walks on these highly degenerate polytopes;
        // the reported objective below is still taken at true costs, and the
        // perturbed-optimal vertex lies within ~1e-8 * scale of the true
        // optimum in objective value
        Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n_ + m_);
        double cmax = 1.0;
        for (int j = 0; j < n_; ++j)
            cmax = std::max(cmax, std::fabs(lp_.cost[static_cast<size_t>(j)]));
        for (int j = 0; j < n_; ++j)
            c2(j) = lp_.cost[static_cast<size_t>(j)] + 1e-8 * cmax * hash01(j);
        // phase-2 pricing stops at 1e-7 * cost scale: the duality gap left
        // on the table is below every consumer's tolerance, and grinding
        // degenerate pivots to resolve roundoff-level reduced costs is the
        // dominant cost on these massively degenerate polytopes
        auto st2 = iterate(c2, res.iterations, std::max(opt_.tol, 1e-7));
        res.status = st2;
        if (st2 != SimplexResult::Status::optimal) return res;
        // restore the true rhs: the final basis is dual feasible regardless of
        // b, and re-solving it against the unperturbed rhs removes the O(eps)
        // perturbation from the returned point
        b_ = b_true_;
        refactor();  // clean basis solve before extracting the point

        res.x.assign(static_cast<size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[static_cast<size_t>(i)] < n_)
                res.x[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = std::max(0.0, xB_(i));
        res.objective = 0.0;
        for (int j = 0; j < n_; ++j) res.objective += lp_.cost[static_cast<size_t>(j)] * res.x[static_cast<size_t>(j)];

        Eigen::VectorXd y = dual_vector(c2);
        res.dual.resize(static_cast<size_t>(m_));
        for (int i = 0; i < m_; ++i) res.dual[static_cast<size_t>(i)] = row_sign_[static_cast<size_t>(i)] * y(i);
        res.reduced.resize(static_cast<size_t>(n_));
        for (int j = 0; j < n_; ++j) res.reduced[static_cast<size_t>(j)] = c2(j) - dot_col(j, y);

        // residual in the original (unsigned) system
        Eigen::VectorXd ax = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < n_; ++j) {
            double xj = res.x[static_cast<size_t>(j)];
            if (xj == 0.0) continue;
            for (const auto& [r, a] : lp_.cols[static_cast<size_t>(j)]) ax(r) += a * xj;
        }
        double rr = 0.0;
        for (int i = 0; i < m_; ++i) rr = std::max(rr, std::fabs(ax(i) - lp_.rhs[static_cast<size_t>(i)]));
        res.constraint_residual = rr;
        res.basis = basis_;
        return res;
    }

private:
    // adopt a caller-supplied basis when it factors to a primal feasible
    // point, so solves constrained near a known optimum can skip phase 1
    void try_warm_start(const std::vector<int>& wb) {
        if (static_cast<int>(wb.size()) != m_) return;
        std::vector<bool> seen(static_cast<size_t>(n_ + m_), false);
        for (int j : wb) {
            if (j < 0 || j >= n_ + m_ || seen[static_cast<size_t>(j)]) return;
            seen[static_cast<size_t>(j)] = true;
        }
        std::vector<int> saved_basis = basis_;
        basis_ = wb;
        in_basis_.assign(static_cast<size_t>(n_ + m_), false);
        for (int j : basis_) in_basis_[static_cast<size_t>(j)] = true;
        refactor();  // also repairs rank deficiency
        if (xB_.minCoeff() >= -1e-9 * (1.0 + b_.cwiseAbs().maxCoeff())) {
            for (int i = 0; i < m_; ++i)
                if (xB_(i) < 0.0) xB_(i) = 0.0;
            warm_ok_ = true;
            return;
        }
        basis_ = std::move(saved_basis);
        in_basis_.assign(static_cast<size_t>(n_ + m_), false);
        for (int j : basis_) in_basis_[static_cast<size_t>(j)] = true;
        Binv_ = Eigen::MatrixXd::Identity(m_, m_);
        xB_ = b_;
    }

    // signed column entries (row flips applied)
    double dot_col(int j, const Eigen::VectorXd& y) const {
        double s = 0.0;
        for (const auto& [r, a] : lp_.cols[static_cast<size_t>(j)])
            s += row_sign_[static_cast<size_t>(r)] * a * y(r);
        return s;
    }

    Eigen::VectorXd direction(int j) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
        if (j >= n_) {
            w = Binv_.col(j - n_);
        } else {
            for (const auto& [r, a] : lp_.cols[static_cast<size_t>(j)])
                w += (row_sign_[static_cast<size_t>(r)] * a) * Binv_.col(r);
        }
        return w;
    }

    Eigen::VectorXd dual_vector(const Eigen::VectorXd& c) const {
        Eigen::VectorXd cB(m_);
        for (int i = 0; i < m_; ++i) cB(i) = c(basis_[static_cast<size_t>(i)]);
        return Binv_.transpose() * cB;
    }

    void refactor() {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            int j = basis_[static_cast<size_t>(i)];
            if (j >= n_) {
                B(j - n_, i) = 1.0;
            } else {
                for (const auto& [r, a] : lp_.cols[static_cast<size_t>(j)])
                    B(r, i) += row_sign_[static_cast<size_t>(r)] * a;
            }
        }
        // repair a rank-deficient basis (a phantom pivot can sneak in when the
        // running inverse has drifted): swap each dependent column for the
        // artificial unit column of a row the current range does not cover
        for (int guard = 0; guard <= m_; ++guard) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
            lu.setThreshold(1e-10);
            if (lu.rank() == m_) break;
            Eigen::VectorXd v = lu.kernel().col(0);            // B v = 0
            Eigen::VectorXd z =
                B.transpose().fullPivLu().kernel().col(0);     // z^T B = 0
            int pos = 0, r0 = 0;
            v.cwiseAbs().maxCoeff(&pos);
            z.cwiseAbs().maxCoeff(&r0);
            in_basis_[static_cast<size_t>(basis_[static_cast<size_t>(pos)])] = false;
            basis_[static_cast<size_t>(pos)] = n_ + r0;
            in_basis_[static_cast<size_t>(n_ + r0)] = true;
            B.col(pos) = Eigen::VectorXd::Unit(m_, r0);
        }
        Binv_ = B.partialPivLu().inverse();
        xB_ = Binv_ * b_;
        for (int i = 0; i < m_; ++i)
            if (xB_(i) < 0.0 && xB_(i) > -1e-9) xB_(i) = 0.0;
    }

    SimplexResult::Status iterate(const Eigen::VectorXd& c, int& iter_count, double price_tol) {
        int degen_streak = 0;
        int since_refactor = 0;
        gamma_ = Eigen::VectorXd::Ones(n_);
        double cscale = 1.0;
        for (int j = 0; j < n_; ++j) cscale = std::max(cscale, std::fabs(c(j)));
        const double dtol = price_tol * cscale;
        const int stall_limit = opt_.bland_after + 8 * m_;
        while (iter_count < opt_.max_iter) {
            if (degen_streak >= stall_limit) {
                // long degenerate streak at a fixed objective: re-price from a
                // fresh factorization and accept optimality under a relaxed
                // tolerance, since roundoff-level reduced costs can keep the
                // strict test negative forever
                refactor();
                since_refactor = 0;
                Eigen::VectorXd yf = dual_vector(c);
                double dmin = 0.0;
                for (int j = 0; j < n_; ++j) {
                    if (in_basis_[static_cast<size_t>(j)]) continue;
                    dmin = std::min(dmin, c(j) - dot_col(j, yf));
                }
                if (dmin >= -1e-7 * cscale) return SimplexResult::Status::optimal;
                degen_streak = opt_.bland_after;  // keep Bland, re-arm the escape
            }
            Eigen::VectorXd y = dual_vector(c);
            bool bland = degen_streak >= opt_.bland_after;
            int enter = -1;
            double enter_d = 0.0;
            double best = 0.0;
            for (int j = 0; j < n_; ++j) {  // artificials never re-enter
                if (in_basis_[static_cast<size_t>(j)]) continue;
                double d = c(j) - dot_col(j, y);
                if (d < -dtol) {
                    if (bland) {
                        enter = j;
                        enter_d = d;
                        break;
                    }
                    // devex pricing: largest d^2 / gamma_j
                    double score = d * d / gamma_(j);
                    if (score > best) {
                        best = score;
                        enter = j;
                        enter_d = d;
                    }
                }
            }
            if (enter < 0) {
                if (since_refactor == 0) return SimplexResult::Status::optimal;
                refactor();  // confirm optimality against a fresh factorization
                since_refactor = 0;
                continue;
            }

            Eigen::VectorXd w = direction(enter);

            // leaving-row selection: prefer kicking a zero-level artificial,
            // otherwise run the ratio test with the given pivot floor; among
            // (near-)tied minimum ratios pick the largest pivot for stability,
            // or the lowest basis index under Bland's rule
            double ratio = 0.0;
            auto pick_leave = [&](double floor_tol) {
                int leave = -1;
                for (int i = 0; i < m_; ++i) {
                    if (basis_[static_cast<size_t>(i)] >= n_ && xB_(i) <= opt_.tol &&
                        std::fabs(w(i)) > kKickTol) {
                        if (leave < 0 || std::fabs(w(i)) > std::fabs(w(leave))) leave = i;
                    }
                }
                ratio = 0.0;
                if (leave >= 0) return leave;
                ratio = 1e300;
                for (int i = 0; i < m_; ++i)
                    if (w(i) > floor_tol) ratio = std::min(ratio, std::max(0.0, xB_(i)) / w(i));
                if (ratio == 1e300) return -1;
                double slack = 1e-9 * (1.0 + ratio);
                for (int i = 0; i < m_; ++i) {
                    if (w(i) <= floor_tol) continue;
                    double r = std::max(0.0, xB_(i)) / w(i);
                    if (r > ratio + slack) continue;
                    if (bland) {
                        if (leave < 0 ||
                            basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])
                            leave = i;
                    } else if (leave < 0 || w(i) > w(leave)) {
                        leave = i;
                    }
                }
                return leave;
            };

            int leave = pick_leave(opt_.pivot_tol);
            if (leave < 0 || std::fabs(w(leave)) < kTrustTol) {
                // the candidate pivot may be a phantom of accumulated update
                // error; recompute the direction from a fresh factorization
                // and insist on a solid pivot, so the basis stays nonsingular
                refactor();
                since_refactor = 0;
                w = direction(enter);
                leave = pick_leave(std::max(opt_.pivot_tol, kTrustTol));
                if (leave < 0) {
                    double d = c(enter) - dot_col(enter, dual_vector(c));
                    if (d >= -dtol) continue;  // stale pricing, not a real descent column
                    // genuinely attractive but only tiny pivots available:
                    // accept the best of them off the fresh factorization
                    leave = pick_leave(opt_.pivot_tol);
                    if (leave < 0) return SimplexResult::Status::unbounded;
                }
            }
            degen_streak = ratio <= opt_.tol ? degen_streak + 1 : 0;

            // devex reference weights: gamma_j = max(gamma_j, (alpha_j/piv)^2 * gamma_q)
            // with alpha_j the pivot-row component of B^-1 a_j, taken before the update
            {
                double piv0 = w(leave);
                double gq = std::max(gamma_(enter), 1.0);
                Eigen::VectorXd rho = Binv_.row(leave).transpose();
                bool overflow = false;
                for (int j = 0; j < n_; ++j) {
                    if (in_basis_[static_cast<size_t>(j)] || j == enter) continue;
                    double alpha = dot_col(j, rho) / piv0;
                    double cand = alpha * alpha * gq;
                    if (cand > gamma_(j)) gamma_(j) = cand;
                    if (gamma_(j) > 1e12) overflow = true;
                }
                if (basis_[static_cast<size_t>(leave)] < n_)
                    gamma_(basis_[static_cast<size_t>(leave)]) =
                        std::max(gq / (piv0 * piv0), 1.0);
                if (overflow) gamma_.setOnes();  // restart the reference framework
            }
            (void)enter_d;

            // pivot update of Binv and xB
            double piv = w(leave);
            Binv_.row(leave) /= piv;
            double xr = xB_(leave) / piv;
            xB_(leave) = xr;
            for (int i = 0; i < m_; ++i) {
                if (i == leave) continue;
                double wi = w(i);
                if (wi != 0.0) {
                    Binv_.row(i) -= wi * Binv_.row(leave);
                    xB_(i) -= wi * xr;
                    if (xB_(i) < 0.0 && xB_(i) > -1e-9) xB_(i) = 0.0;
                }
            }
            in_basis_[static_cast<size_t>(basis_[static_cast<size_t>(leave)])] = false;
            basis_[static_cast<size_t>(leave)] = enter;
            in_basis_[static_cast<size_t>(enter)] = true;

            ++iter_count;
            if (++since_refactor >= opt_.refactor_every) {
                refactor();
                since_refactor = 0;
            }
            if (!xB_.allFinite()) {
                refactor();
                since_refactor = 0;
                if (!xB_.allFinite())
                    throw std::runtime_error("solve_lp: numerical breakdown (singular basis)");
            }
        }
        return SimplexResult::Status::iteration_limit;
    }

    const SparseLP& lp_;
    const SimplexOptions& opt_;
    int m_{0}, n_{0};
    std::vector<double> row_sign_;
    Eigen::VectorXd b_;       // perturbed (signed) rhs the iterations run on
    Eigen::VectorXd b_true_;  // unperturbed signed rhs, restored at extraction
    std::vector<int> basis_;
    std::vector<bool> in_basis_;
    Eigen::MatrixXd Binv_;
    Eigen::VectorXd xB_;
    Eigen::VectorXd gamma_;  // devex reference weights, structural vars only
    bool warm_ok_{false};
};

}  // namespace

SimplexResult solve_lp(const SparseLP& lp, const SimplexOptions& opt) {
    if (lp.rows <= 0) throw std::invalid_argument("solve_lp: empty system");
    if (static_cast<int>(lp.rhs.size()) != lp.rows)
        throw std::invalid_argument("solve_lp: rhs size mismatch");
    try {
        return RevisedSimplex(lp, opt).run();
    } catch (const std::runtime_error&) {
        // numerical breakdown: retry with conservative settings (Bland from the
        // start, a raised pivot floor and frequent refactorization)
        SimplexOptions safe = opt;
        safe.bland_after = 0;
        safe.pivot_tol = std::max(opt.pivot_tol, 1e-7);
        safe.refactor_every = 64;
        return RevisedSimplex(lp, safe).run();
    }
}

}  // namespace wkam

#include "wkam/model.hpp"

#include <cmath>
#include <stdexcept>

namespace wkam {

namespace {
constexpr double kPi = 3.14159265358979323846;

double potential(double x) { return std::cos(2.0 * kPi * x); }
}  // namespace

double fenchel_lagrangian(const Model& m, double x, double v, double u,
                          double pmax, int pcount) {
    if (pcount < 5) throw std::invalid_argument("fenchel_lagrangian: pcount too small");
    double dp = 2.0 * pmax / (pcount - 1);
    double best = -1e300;
    int best_k = 0;
    for (int k = 0; k < pcount; ++k) {
        double p = -pmax + k * dp;
        double f = p * v - m.hamiltonian(x, p, u);
        if (f > best) {
            best = f;
            best_k = k;
        }
    }
    if (best_k == 0 || best_k == pcount - 1)
        throw std::runtime_error("fenchel_lagrangian: superlinearity budget exceeded (argmax on p-grid boundary)");
    // quadratic fit through the argmax and its neighbors
    double pm = -pmax + (best_k - 1) * dp;
    double p0 = -pmax + best_k * dp;
    double pp = -pmax + (best_k + 1) * dp;
    double fm = pm * v - m.hamiltonian(x, pm, u);
    double f0 = best;
    double fp = pp * v - m.hamiltonian(x, pp, u);
    double denom = fm - 2.0 * f0 + fp;
    if (denom >= -1e-14) return f0;  // flat region, grid max is fine
    double shift = 0.5 * (fm - fp) / denom * dp;
    double pstar = p0 - shift;
    // evaluate the actual objective at the fitted vertex
    double fstar = pstar * v - m.hamiltonian(x, pstar, u);
    return std::max(f0, fstar);
}

double partial_L_u0(const Model& m, double x, double v) {
    double g;
    if (m.dLdu0) {
        g = m.dLdu0(x, v);
    } else {
        const double eps = 1e-5;
        g = (m.lagrangian(x, v, eps) - m.lagrangian(x, v, -eps)) / (2.0 * eps);
    }
    if (g > 1e-8)
        throw std::runtime_error("partial_L_u0: positive u-derivative (violates (L0))");
    return g;
}

bool ConditionReport::all_pass() const {
    auto ok = [](const ConditionVerdict& c) {
        return c.status == ConditionVerdict::Status::pass;
    };
    return ok(monotonicity) && ok(convexity) && ok(coercivity) && ok(u_derivative) && ok(concavity);
}

ConditionReport check_conditions(const Model& m, const SamplingSpec& spec) {
    ConditionReport rep;
    const double tol = 1e-9;
    auto xs = [&](int i) { return m.period * (i + 0.5) / spec.nx; };
    auto vs = [&](int j) { return -spec.vbox + 2.0 * spec.vbox * j / (spec.nv - 1); };
    auto us = [&](int k) { return -spec.ubox + 2.0 * spec.ubox * k / (spec.nu - 1); };

    // (L0): L non-increasing in u
    {
        ConditionVerdict& c = rep.monotonicity;
        c.status = ConditionVerdict::Status::pass;
        for (int i = 0; i < spec.nx; ++i)
            for (int j = 0; j < spec.nv; ++j)
                for (int k = 0; k + 1 < spec.nu; ++k) {
                    double d = m.lagrangian(xs(i), vs(j), us(k + 1)) -
                               m.lagrangian(xs(i), vs(j), us(k));
                    if (d > c.worst) {
                        c.worst = d;
                        c.witness = {xs(i), vs(j), us(k + 1)};
                    }
                }
        if (c.worst > tol) {
            c.status = ConditionVerdict::Status::fail;
            c.note = "L increases in u at witness";
        }
    }

    // (L1): midpoint convexity in v
    {
        ConditionVerdict& c = rep.convexity;
        c.status = ConditionVerdict::Status::pass;
        for (int i = 0; i < spec.nx; ++i)
            for (int k = 0; k < spec.nu; ++k)
                for (int j = 0; j + 2 < spec.nv; ++j) {
                    double va = vs(j), vb = vs(j + 2);
                    double d = m.lagrangian(xs(i), 0.5 * (va + vb), us(k)) -
                               0.5 * (m.lagrangian(xs(i), va, us(k)) +
                                      m.lagrangian(xs(i), vb, us(k)));
                    if (d > c.worst) {
                        c.worst = d;
                        c.witness = {xs(i), 0.5 * (va + vb), us(k)};
                    }
                }
        if (c.worst > tol) {
            c.status = ConditionVerdict::Status::fail;
            c.note = "midpoint convexity in v violated";
        }
    }

    // (L2) via (H2') proxy: H(x, +/-P, u) grows without bound in P
    {
        ConditionVerdict& c = rep.coercivity;
        double mP[3];
        const double P[3] = {2.0, 4.0, 8.0};
        for (int t = 0; t < 3; ++t) {
            double mn = 1e300;
            for (int i = 0; i < spec.nx; ++i)
                for (int k = 0; k < spec.nu; ++k) {
                    mn = std::min(mn, m.hamiltonian(xs(i), P[t], us(k)));
                    mn = std::min(mn, m.hamiltonian(xs(i), -P[t], us(k)));
                }
            mP[t] = mn;
        }
        c.worst = mP[2] - mP[0];
        if (mP[2] > mP[1] && mP[1] > mP[0] && mP[2] - mP[0] > 1.0) {
            c.status = ConditionVerdict::Status::pass;
        } else {
            c.status = ConditionVerdict::Status::fail;
            c.note = "H not coercive along the probed p-ladder";
        }
    }

    // (L3): first-order expansion around u = 0 at |u| in {1e-2, 1e-3}
    {
        ConditionVerdict& c = rep.u_derivative;
        double worst_ratio = 0.0;
        for (int i = 0; i < spec.nx; ++i)
            for (int j = 0; j < spec.nv; ++j) {
                double g;
                try {
                    g = partial_L_u0(m, xs(i), vs(j));
                } catch (const std::exception&) {
                    c.status = ConditionVerdict::Status::fail;
                    c.note = "u-derivative at 0 violates (L0)";
                    c.witness = {xs(i), vs(j), 0.0};
                    goto l3_done;
                }
                for (double uu : {1e-2, -1e-2, 1e-3, -1e-3}) {
                    double err = std::fabs(m.lagrangian(xs(i), vs(j), uu) -
                                           m.lagrangian(xs(i), vs(j), 0.0) - uu * g);
                    double ratio = err / std::fabs(uu);
                    if (ratio > worst_ratio) {
                        worst_ratio = ratio;
                        c.witness = {xs(i), vs(j), uu};
                    }
                }
            }
        c.worst = worst_ratio;
        c.status = worst_ratio <= 5e-2 ? ConditionVerdict::Status::pass
                                       : ConditionVerdict::Status::fail;
        if (c.status == ConditionVerdict::Status::fail)
            c.note = "first-order expansion residual too large";
    l3_done:;
    }

    // (L5): midpoint concavity in u
    {
        ConditionVerdict& c = rep.concavity;
        c.status = ConditionVerdict::Status::pass;
        for (int i = 0; i < spec.nx; ++i)
            for (int j = 0; j < spec.nv; ++j)
                for (int k = 0; k + 2 < spec.nu; ++k) {
                    double ua = us(k), ub = us(k + 2);
                    double d = 0.5 * (m.lagrangian(xs(i), vs(j), ua) +
                                      m.lagrangian(xs(i), vs(j), ub)) -
                               m.lagrangian(xs(i), vs(j), 0.5 * (ua + ub));
                    if (d > c.worst) {
                        c.worst = d;
                        c.witness = {xs(i), vs(j), 0.5 * (ua + ub)};
                    }
                }
        if (c.worst > tol) {
            c.status = ConditionVerdict::Status::fail;
            c.note = "midpoint concavity in u violated";
        }
    }

    // note whether the coupling vanishes identically on the sample box
    {
        bool vanishes = true;
        for (int i = 0; i < spec.nx && vanishes; ++i)
            for (int j = 0; j < spec.nv && vanishes; ++j) {
                double g = m.dLdu0 ? m.dLdu0(xs(i), vs(j))
                                   : (m.lagrangian(xs(i), vs(j), 1e-5) -
                                      m.lagrangian(xs(i), vs(j), -1e-5)) / 2e-5;
                if (std::fabs(g) > 1e-10) vanishes = false;
            }
        rep.dLdu_vanishes_everywhere = vanishes;
    }
    return rep;
}

double alpha_bump(double x, double period) {
    double r = x - period * std::floor(x / period);
    if (r < 0.5 || r > 1.5) return 0.0;
    double c = std::cos(kPi * r);
    return c * c;
}

Model pendulum(int n) {
    if (n < 1) throw std::invalid_argument("pendulum: n must be >= 1");
    Model m;
    m.period = static_cast<double>(n);
    m.label = "pendulum(" + std::to_string(n) + ")";
    m.hamiltonian = [](double x, double p, double) { return 0.5 * p * p + potential(x); };
    m.lagrangian = [](double x, double v, double) { return 0.5 * v * v - potential(x); };
    m.dLdu0 = [](double, double) { return 0.0; };
    m.affine_in_u = true;
    return m;
}

Model discounted_linear(int n) {
    if (n < 1) throw std::invalid_argument("discounted_linear: n must be >= 1");
    Model m;
    m.period = static_cast<double>(n);
    m.label = "discounted_linear(" + std::to_string(n) + ")";
    m.hamiltonian = [](double x, double p, double u) { return 0.5 * p * p + potential(x) + u; };
    m.lagrangian = [](double x, double v, double u) { return 0.5 * v * v - potential(x) - u; };
    m.dLdu0 = [](double, double) { return -1.0; };
    m.affine_in_u = true;
    return m;
}

Model alpha_coupled(int n, double alpha_shift) {
    if (n < 2) throw std::invalid_argument("alpha_coupled: n must be >= 2");
    Model m;
    double period = static_cast<double>(n);
    m.period = period;
    m.label = "alpha_coupled(" + std::to_string(n) + ")";
    auto a = [period, alpha_shift](double x) { return alpha_bump(x, period) + alpha_shift; };
    m.hamiltonian = [a](double x, double p, double u) {
        return 0.5 * p * p + potential(x) + a(x) * u;
    };
    m.lagrangian = [a](double x, double v, double u) {
        return 0.5 * v * v - potential(x) - a(x) * u;
    };
    m.dLdu0 = [a](double x, double) { return -a(x); };
    m.affine_in_u = true;
    return m;
}

Model shifted(const Model& base, double c0) {
    Model m;
    m.period = base.period;
    m.label = "shifted(" + base.label + ", " + std::to_string(c0) + ")";
    auto H = base.hamiltonian;
    auto L = base.lagrangian;
    m.hamiltonian = [H, c0](double x, double p, double u) { return H(x, p, c0 + u); };
    m.lagrangian = [L, c0](double x, double v, double u) { return L(x, v, c0 + u); };
    if (base.affine_in_u && base.dLdu0) {
        m.dLdu0 = base.dLdu0;  // affine coupling: u-slope independent of u
        m.affine_in_u = true;
    }
    return m;
}

Model model_zoo(const std::string& name, const ModelParams& params) {
    if (name == "pendulum") return pendulum(params.n);
    if (name == "discounted_linear") return discounted_linear(params.n);
    if (name == "alpha_coupled") return alpha_coupled(params.n, params.alpha_shift);
    if (name == "shifted") {
        ModelParams base_params = params;
        Model base = model_zoo(params.base, base_params);
        return shifted(base, params.c0);
    }
    throw std::invalid_argument("model_zoo: unknown model name '" + name + "'");
}

}  // namespace wkam

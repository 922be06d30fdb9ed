#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "wkam/torus_grid.hpp"

namespace wkam {

/// A Hamiltonian/Lagrangian pair H(x,p,u), L(x,v,u) on R/(period Z),
/// with the u-derivative of L at u = 0 when known analytically.
struct Model {
    double period{1.0};
    std::string label;
    std::function<double(double, double, double)> hamiltonian;  // (x, p, u)
    std::function<double(double, double, double)> lagrangian;   // (x, v, u)
    std::function<double(double, double)> dLdu0;                // (x, v), may be empty
    /// L(x,v,u) = L(x,v,0) + u * dLdu0(x,v) holds exactly.
    bool affine_in_u{false};
};

/// Numeric convex conjugate L(x,v,u) = sup_p p v - H(x,p,u) over a uniform
/// p-grid on [-pmax, pmax], refined by one quadratic fit around the discrete
/// argmax. Throws if the argmax sits on the grid boundary.
double fenchel_lagrangian(const Model& m, double x, double v, double u,
                          double pmax = 8.0, int pcount = 2001);

/// dL/du at u = 0: analytic when the model carries it, otherwise a central
/// finite difference with step 1e-5. Throws if the value is positive beyond
/// 1e-8 (violates monotonicity (L0)).
double partial_L_u0(const Model& m, double x, double v);

struct SamplingSpec {
    double vbox{3.0};
    double ubox{2.0};
    int nx{24};
    int nv{17};
    int nu{9};
};

struct ConditionVerdict {
    enum class Status { pass, fail, unknown };
    Status status{Status::unknown};
    double worst{0.0};                    // magnitude of worst violation
    std::array<double, 3> witness{};      // (x, v-or-p, u) of worst sample
    std::string note;
};

struct ConditionReport {
    ConditionVerdict monotonicity;   // (L0)
    ConditionVerdict convexity;      // (L1)
    ConditionVerdict coercivity;     // (L2) via the (H2') proxy
    ConditionVerdict u_derivative;   // (L3) first-order expansion probe
    ConditionVerdict concavity;      // (L5)
    bool dLdu_vanishes_everywhere{false};

    bool all_pass() const;
};

/// Deterministic grid sampling over the (x, v, u) box of the spec's probes.
ConditionReport check_conditions(const Model& m, const SamplingSpec& spec = {});

// Model zoo.
Model pendulum(int n);                                    // H = p^2/2 + cos(2 pi x)
Model discounted_linear(int n);                           // H = p^2/2 + cos(2 pi x) + u
Model alpha_coupled(int n, double alpha_shift = 0.0);     // H = p^2/2 + cos(2 pi x) + (alpha_n + shift) u
Model shifted(const Model& base, double c0);              // H~(x,p,u) = H(x,p,c0 + u)

/// Bump cos^2(pi x) on [1/2, 3/2], zero elsewhere, extended period-periodically.
double alpha_bump(double x, double period);

struct ModelParams {
    int n{1};
    double alpha_shift{0.0};
    double c0{0.0};
    std::string base;  // for "shifted"
};

/// Selection by name: pendulum, discounted_linear, alpha_coupled, shifted.
Model model_zoo(const std::string& name, const ModelParams& params);

}  // namespace wkam

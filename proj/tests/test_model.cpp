#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wkam/model.hpp"

using namespace wkam;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("pendulum hamiltonian and lagrangian are conjugate") {
    Model m = pendulum(1);
    CHECK(m.period == 1.0);
    CHECK(m.hamiltonian(0.0, 0.0, 0.0) == doctest::Approx(1.0));       // cos(0)
    CHECK(m.hamiltonian(0.25, 2.0, 5.0) == doctest::Approx(2.0));      // u ignored
    CHECK(m.lagrangian(0.0, 0.0, 0.0) == doctest::Approx(-1.0));
    CHECK(m.lagrangian(0.5, 1.0, 0.0) == doctest::Approx(0.5 + 1.0));  // v^2/2 - cos(pi)

    // numeric Fenchel transform agrees with the analytic Lagrangian
    for (double x : {0.0, 0.13, 0.48, 0.77})
        for (double v : {-2.5, -1.0, 0.0, 0.7, 2.9})
            CHECK(std::fabs(fenchel_lagrangian(m, x, v, 0.0) - m.lagrangian(x, v, 0.0)) <= 1e-4);
}

TEST_CASE("fenchel transform rejects boundary argmax") {
    Model m = pendulum(1);
    // v far beyond pmax: the sup is attained at the p-grid boundary
    CHECK_THROWS(fenchel_lagrangian(m, 0.0, 50.0, 0.0, 4.0, 401));
}

TEST_CASE("alpha_coupled sample value at (1, 0, 2)") {
    Model m = alpha_coupled(2);
    // alpha(1) = cos^2(pi) = 1 on the bump; L = v^2/2 - cos(2 pi x) - alpha * u
    CHECK(alpha_bump(1.0, 2.0) == doctest::Approx(1.0));
    CHECK(m.lagrangian(1.0, 0.0, 2.0) == doctest::Approx(-3.0));
    CHECK(fenchel_lagrangian(m, 1.0, 0.0, 2.0) == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("alpha bump support and smoothness") {
    CHECK(alpha_bump(0.0, 2.0) == 0.0);
    CHECK(alpha_bump(0.25, 2.0) == 0.0);
    CHECK(alpha_bump(0.5, 2.0) == doctest::Approx(std::cos(kPi * 0.5) * std::cos(kPi * 0.5)));
    CHECK(alpha_bump(1.0, 2.0) == doctest::Approx(1.0));
    CHECK(alpha_bump(1.5, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(alpha_bump(1.75, 2.0) == 0.0);
    // periodic extension
    CHECK(alpha_bump(3.0, 2.0) == doctest::Approx(1.0));
    CHECK(alpha_bump(-1.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("partial_L_u0 analytic and finite difference agree") {
    Model lin = discounted_linear(1);
    CHECK(partial_L_u0(lin, 0.3, 1.2) == doctest::Approx(-1.0));

    Model ac = alpha_coupled(2);
    CHECK(partial_L_u0(ac, 0.25, 0.0) == doctest::Approx(0.0));
    CHECK(partial_L_u0(ac, 1.0, 0.5) == doctest::Approx(-1.0));

    // strip the analytic derivative; the finite difference must agree
    Model fd = ac;
    fd.dLdu0 = nullptr;
    CHECK(partial_L_u0(fd, 1.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-6));

    // a model increasing in u violates monotonicity
    Model bad = lin;
    bad.lagrangian = [](double, double v, double u) { return 0.5 * v * v + u; };
    bad.dLdu0 = nullptr;
    CHECK_THROWS(partial_L_u0(bad, 0.0, 0.0));
}

TEST_CASE("condition report for the zoo") {
    ConditionReport pen = check_conditions(pendulum(1));
    CHECK(pen.all_pass());
    CHECK(pen.dLdu_vanishes_everywhere);

    ConditionReport lin = check_conditions(discounted_linear(1));
    CHECK(lin.all_pass());
    CHECK_FALSE(lin.dLdu_vanishes_everywhere);

    ConditionReport ac = check_conditions(alpha_coupled(4));
    CHECK(ac.all_pass());
    CHECK_FALSE(ac.dLdu_vanishes_everywhere);
}

TEST_CASE("condition checks catch violations") {
    // concave-in-v Hamiltonian: convexity of L fails structurally, so probe H
    Model bad = pendulum(1);
    bad.hamiltonian = [](double, double p, double) { return -p * p; };
    bad.lagrangian = [](double, double v, double) { return -0.5 * v * v; };
    ConditionReport rep = check_conditions(bad);
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("shifted model composes the u argument") {
    Model base = discounted_linear(1);
    Model s = shifted(base, -1.0);
    CHECK(s.hamiltonian(0.2, 0.5, 0.0) ==
          doctest::Approx(base.hamiltonian(0.2, 0.5, -1.0)));
    CHECK(s.lagrangian(0.2, 0.5, 0.0) == doctest::Approx(base.lagrangian(0.2, 0.5, -1.0)));
    CHECK(s.affine_in_u);
    CHECK(partial_L_u0(s, 0.2, 0.5) == doctest::Approx(-1.0));
}

TEST_CASE("model zoo dispatch") {
    ModelParams p;
    p.n = 4;
    CHECK(model_zoo("pendulum", p).period == 4.0);
    CHECK(model_zoo("alpha_coupled", p).label.find("alpha_coupled") != std::string::npos);
    p.base = "discounted_linear";
    p.c0 = -1.0;
    Model s = model_zoo("shifted", p);
    CHECK(s.hamiltonian(0.0, 0.0, 1.0) ==
          doctest::Approx(discounted_linear(4).hamiltonian(0.0, 0.0, 0.0)));
    CHECK_THROWS_AS((void)model_zoo("nope", p), std::invalid_argument);
}

TEST_CASE("alpha_shift lifts the coupling everywhere") {
    Model m = alpha_coupled(4, 0.2);
    CHECK(partial_L_u0(m, 0.25, 0.0) == doctest::Approx(-0.2));  // off the bump
    CHECK(partial_L_u0(m, 1.0, 0.0) == doctest::Approx(-1.2));   // on the bump
}

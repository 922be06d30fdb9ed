#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "wkam/torus_grid.hpp"

using namespace wkam;

TEST_CASE("make_grid basics") {
    Grid g = make_grid(1.0, 64);
    CHECK(g.points == 64);
    CHECK(g.spacing == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(63) == doctest::Approx(63.0 / 64));
    CHECK(g.node(64) == 0.0);  // wraps
    CHECK(g.wrap_index(-1) == 63);
    CHECK(g.wrap_index(130) == 2);
}

TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(0.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 7), std::invalid_argument);
}

TEST_CASE("wrap_x reduces into [0, period)") {
    Grid g = make_grid(2.0, 16);
    CHECK(g.wrap_x(2.0) == doctest::Approx(0.0));
    CHECK(g.wrap_x(-0.5) == doctest::Approx(1.5));
    CHECK(g.wrap_x(5.25) == doctest::Approx(1.25));
    CHECK(g.wrap_x(0.75) == doctest::Approx(0.75));
}

TEST_CASE("interp is exact at nodes and linear between them") {
    Grid g = make_grid(1.0, 32);
    GridFunction f = sample(g, [](double x) { return std::sin(2 * 3.14159265358979324 * x); });
    for (int i = 0; i < g.points; ++i)
        CHECK(interp(f, g.node(i)) == doctest::Approx(f.values[i]).epsilon(1e-15));
    // midpoint of a cell is the average of the endpoints
    double mid = 0.5 * (f.values[3] + f.values[4]);
    CHECK(interp(f, g.node(3) + 0.5 * g.spacing) == doctest::Approx(mid).epsilon(1e-13));
    // periodic wrap cell between the last and first node
    double wrap_mid = 0.5 * (f.values[31] + f.values[0]);
    CHECK(interp(f, g.node(31) + 0.5 * g.spacing) == doctest::Approx(wrap_mid).epsilon(1e-13));
    // query far outside the fundamental domain
    CHECK(interp(f, g.node(5) + 7.0) == doctest::Approx(f.values[5]).epsilon(1e-12));
}

TEST_CASE("interp reproduces piecewise-linear hat exactly") {
    Grid g = make_grid(1.0, 16);
    GridFunction hat = make_constant(g, 0.0);
    hat.values[4] = 1.0;
    CHECK(interp(hat, g.node(4) - 0.25 * g.spacing) == doctest::Approx(0.75));
    CHECK(interp(hat, g.node(4) + 0.5 * g.spacing) == doctest::Approx(0.5));
    CHECK(interp(hat, g.node(6)) == 0.0);
}

TEST_CASE("min, max, sup_dist, lipschitz") {
    Grid g = make_grid(1.0, 64);
    GridFunction f = sample(g, [](double x) { return x * (1.0 - x); });
    CHECK(min_value(f) == doctest::Approx(0.0));
    CHECK(max_value(f) == doctest::Approx(0.25).epsilon(1e-3));

    GridFunction h = f;
    h.values[10] += 0.5;
    CHECK(sup_dist(f, h) == doctest::Approx(0.5));
    CHECK_THROWS_AS(sup_dist(f, make_constant(make_grid(1.0, 32), 0.0)), std::invalid_argument);

    // sawtooth x has slope 1 in the interior and a steep wrap edge
    GridFunction id = sample(g, [](double x) { return x; });
    CHECK(lipschitz_estimate(id) == doctest::Approx((63.0 / 64) / g.spacing));
    CHECK(lipschitz_estimate(make_constant(g, 3.0)) == 0.0);
}

TEST_CASE("velocity grid is symmetric with an exact zero") {
    VelocityGrid vg = make_velocity_grid(3.0, 121);
    CHECK(vg.count == 121);
    CHECK(vg.v.front() == doctest::Approx(-3.0));
    CHECK(vg.v.back() == doctest::Approx(3.0));
    CHECK(vg.v[60] == 0.0);  // exact, not approximate
    for (int j = 0; j < 60; ++j) CHECK(vg.v[j] == doctest::Approx(-vg.v[120 - j]).epsilon(1e-14));
    CHECK_THROWS_AS(make_velocity_grid(3.0, 120), std::invalid_argument);
    CHECK_THROWS_AS(make_velocity_grid(3.0, 1), std::invalid_argument);
}

TEST_CASE("csv writer round trip") {
    Grid g = make_grid(1.0, 8);
    GridFunction f = sample(g, [](double x) { return 2.0 * x; });
    write_csv(f, "/tmp/wkam_grid_test.csv");
    std::ifstream in("/tmp/wkam_grid_test.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,value");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 8);
}

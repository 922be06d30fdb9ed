#pragma once

#include <string>
#include <vector>

#include "wkam/torus_grid.hpp"

namespace wkam {

/// Nonnegative weights on the (node, velocity) product grid, total mass 1.
struct OccupationMeasure {
    Grid grid;
    VelocityGrid vgrid;
    std::vector<double> weights;  // node-major: index = i * vgrid.count + j
    std::string origin;

    double mass() const;
    double& at(int node, int vidx) { return weights[static_cast<size_t>(node * vgrid.count + vidx)]; }
    double at(int node, int vidx) const { return weights[static_cast<size_t>(node * vgrid.count + vidx)]; }

    /// (node, vidx) pairs with weight above the cutoff.
    std::vector<std::pair<int, int>> support(double cutoff = 1e-12) const;
};

OccupationMeasure make_zero_measure(const Grid& g, const VelocityGrid& vg);

/// Expectation of f(x, v) under the measure.
double integrate(const OccupationMeasure& mu, const std::function<double(double, double)>& f);

/// CSV "x,v,weight", nonzero rows only.
void write_csv(const OccupationMeasure& mu, const std::string& path, double cutoff = 1e-12);

}  // namespace wkam

#include "wkam/torus_grid.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wkam {

double Grid::wrap_x(double x) const {
    double r = x - period * std::floor(x / period);
    if (r >= period) r -= period;  // guards against floor rounding at the seam
    return r;
}

Grid make_grid(double period, int points) {
    if (!(period > 0.0)) throw std::invalid_argument("make_grid: period must be positive");
    if (points < 8) throw std::invalid_argument("make_grid: points too small (need >= 8)");
    Grid g;
    g.period = period;
    g.points = points;
    g.spacing = period / points;
    return g;
}

GridFunction make_constant(const Grid& g, double value) {
    return GridFunction{g, std::vector<double>(static_cast<size_t>(g.points), value)};
}

GridFunction sample(const Grid& g, const std::function<double(double)>& f) {
    GridFunction out{g, {}};
    out.values.resize(static_cast<size_t>(g.points));
    for (int i = 0; i < g.points; ++i) out.values[static_cast<size_t>(i)] = f(g.node(i));
    return out;
}

double interp(const GridFunction& f, double x) {
    const Grid& g = f.grid;
    double xr = g.wrap_x(x);
    int i0 = static_cast<int>(std::floor(xr / g.spacing));
    if (i0 >= g.points) i0 = g.points - 1;
    double theta = (xr - i0 * g.spacing) / g.spacing;
    if (theta < 0.0) theta = 0.0;
    if (theta > 1.0) theta = 1.0;
    int i1 = g.wrap_index(i0 + 1);
    return (1.0 - theta) * f.values[static_cast<size_t>(i0)] + theta * f.values[static_cast<size_t>(i1)];
}

double min_value(const GridFunction& f) {
    double m = f.values.front();
    for (double v : f.values) m = std::min(m, v);
    return m;
}

double max_value(const GridFunction& f) {
    double m = f.values.front();
    for (double v : f.values) m = std::max(m, v);
    return m;
}

double sup_dist(const GridFunction& f, const GridFunction& g) {
    if (!f.grid.same_as(g.grid)) throw std::invalid_argument("sup_dist: grid mismatch");
    double m = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i)
        m = std::max(m, std::fabs(f.values[i] - g.values[i]));
    return m;
}

double lipschitz_estimate(const GridFunction& f) {
    const Grid& g = f.grid;
    double m = 0.0;
    for (int i = 0; i < g.points; ++i) {
        double d = std::fabs(f.values[static_cast<size_t>(g.wrap_index(i + 1))] -
                             f.values[static_cast<size_t>(i)]);
        m = std::max(m, d / g.spacing);
    }
    return m;
}

void write_csv(const GridFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "x,value\n";
    out.precision(17);
    for (int i = 0; i < f.grid.points; ++i)
        out << f.grid.node(i) << "," << f.values[static_cast<size_t>(i)] << "\n";
}

VelocityGrid make_velocity_grid(double vmax, int count) {
    if (!(vmax > 0.0)) throw std::invalid_argument("make_velocity_grid: vmax must be positive");
    if (count < 3 || count % 2 == 0)
        throw std::invalid_argument("make_velocity_grid: count must be odd and >= 3");
    VelocityGrid vg;
    vg.vmax = vmax;
    vg.count = count;
    vg.v.resize(static_cast<size_t>(count));
    int half = (count - 1) / 2;
    double dv = vmax / half;
    for (int j = 0; j < count; ++j) vg.v[static_cast<size_t>(j)] = (j - half) * dv;
    vg.v[static_cast<size_t>(half)] = 0.0;
    return vg;
}

}  // namespace wkam

#include "wkam/measure.hpp"

#include <fstream>
#include <stdexcept>

namespace wkam {

double OccupationMeasure::mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

std::vector<std::pair<int, int>> OccupationMeasure::support(double cutoff) const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < grid.points; ++i)
        for (int j = 0; j < vgrid.count; ++j)
            if (at(i, j) > cutoff) out.emplace_back(i, j);
    return out;
}

OccupationMeasure make_zero_measure(const Grid& g, const VelocityGrid& vg) {
    OccupationMeasure mu;
    mu.grid = g;
    mu.vgrid = vg;
    mu.weights.assign(static_cast<size_t>(g.points) * vg.count, 0.0);
    return mu;
}

double integrate(const OccupationMeasure& mu, const std::function<double(double, double)>& f) {
    double s = 0.0;
    for (int i = 0; i < mu.grid.points; ++i) {
        double x = mu.grid.node(i);
        for (int j = 0; j < mu.vgrid.count; ++j) {
            double w = mu.at(i, j);
            if (w != 0.0) s += w * f(x, mu.vgrid.v[static_cast<size_t>(j)]);
        }
    }
    return s;
}

void write_csv(const OccupationMeasure& mu, const std::string& path, double cutoff) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "x,v,weight\n";
    out.precision(17);
    for (int i = 0; i < mu.grid.points; ++i)
        for (int j = 0; j < mu.vgrid.count; ++j)
            if (mu.at(i, j) > cutoff)
                out << mu.grid.node(i) << "," << mu.vgrid.v[static_cast<size_t>(j)] << ","
                    << mu.at(i, j) << "\n";
}

}  // namespace wkam

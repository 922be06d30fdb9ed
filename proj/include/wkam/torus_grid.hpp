#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace wkam {

/// Uniform periodic grid on the flat circle R/(period Z).
struct Grid {
    double period{1.0};
    int points{0};
    double spacing{0.0};

    int wrap_index(int i) const {
        int r = i % points;
        return r < 0 ? r + points : r;
    }

    double node(int i) const { return wrap_index(i) * spacing; }

    /// Reduce x into [0, period).
    double wrap_x(double x) const;

    bool same_as(const Grid& o) const {
        return points == o.points && period == o.period;
    }
};

/// points >= 8, period > 0; throws std::invalid_argument otherwise.
Grid make_grid(double period, int points);

/// Scalar samples on a periodic grid.
struct GridFunction {
    Grid grid;
    std::vector<double> values;
};

GridFunction make_constant(const Grid& g, double value);
GridFunction sample(const Grid& g, const std::function<double(double)>& f);

/// Piecewise-linear periodic interpolation, exact at nodes.
double interp(const GridFunction& f, double x);

double min_value(const GridFunction& f);
double max_value(const GridFunction& f);

/// Max nodewise |f - g|; throws on grid mismatch.
double sup_dist(const GridFunction& f, const GridFunction& g);

/// Max over adjacent node pairs (wrap edge included) of |dvalue| / spacing.
double lipschitz_estimate(const GridFunction& f);

/// CSV with header "x,value", one row per node.
void write_csv(const GridFunction& f, const std::string& path);

/// Uniform symmetric velocity grid on [-vmax, vmax]; count odd so 0 is a node.
struct VelocityGrid {
    double vmax{0.0};
    int count{0};
    std::vector<double> v;
};

VelocityGrid make_velocity_grid(double vmax, int count);

}  // namespace wkam

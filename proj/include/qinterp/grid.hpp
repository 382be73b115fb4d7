// Geometric grids on (0, infinity). Scan-type operations use the
// endpoint-inclusive points; quadrature against the measure dt/t uses the
// midpoint nodes in log coordinates, where the cell weight is exact.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qinterp {

struct LogGrid {
    double t_min = 1e-3;
    double t_max = 1e3;
    int count = 200;

    LogGrid() = default;
    LogGrid(double lo, double hi, int n) : t_min(lo), t_max(hi), count(n) {
        if (!(t_min > 0.0) || !(t_min < t_max))
            throw std::invalid_argument("LogGrid: need 0 < t_min < t_max");
        if (count < 2) throw std::invalid_argument("LogGrid: count >= 2");
    }

    double log_width() const { return std::log(t_max / t_min); }
    // Quadrature weight of one midpoint cell for the measure dt/t.
    double weight() const { return log_width() / count; }

    double midpoint(int j) const {
        return std::exp(std::log(t_min) + (j + 0.5) * weight());
    }
    std::vector<double> midpoints() const {
        std::vector<double> v(static_cast<size_t>(count));
        for (int j = 0; j < count; ++j) v[static_cast<size_t>(j)] = midpoint(j);
        return v;
    }

    std::vector<double> scan_points() const {
        std::vector<double> v(static_cast<size_t>(count));
        const double step = log_width() / (count - 1);
        for (int j = 0; j < count; ++j)
            v[static_cast<size_t>(j)] = std::exp(std::log(t_min) + j * step);
        return v;
    }

    LogGrid scaled(double c) const { return LogGrid(c * t_min, c * t_max, count); }

    // Image grid under t -> t^a (a != 0); midpoint nodes map onto midpoint
    // nodes (in reversed order when a < 0) and the weight scales by |a|.
    LogGrid power_image(double a) const {
        if (a == 0.0) throw std::invalid_argument("LogGrid: zero exponent");
        const double p1 = std::pow(t_min, a);
        const double p2 = std::pow(t_max, a);
        return LogGrid(std::min(p1, p2), std::max(p1, p2), count);
    }
};

}  // namespace qinterp

#ifndef TVFLOW_GRID_HPP
#define TVFLOW_GRID_HPP

#include <array>
#include <cstddef>
#include <stdexcept>

namespace tvflow {

/// Uniform cell-centered grid on an interval (0,L1) or rectangle (0,L1)x(0,L2).
struct Grid {
    int dim = 1;
    std::array<int, 2> n{1, 1};          // cells per axis; n[1] == 1 in 1D
    std::array<double, 2> extent{1.0, 0.0};
    std::array<double, 2> h{1.0, 1.0};

    static Grid line(int n1, double L1) {
        if (n1 < 2 || L1 <= 0.0)
            throw std::invalid_argument("Grid::line: need n1 >= 2 and L1 > 0");
        Grid g;
        g.dim = 1;
        g.n = {n1, 1};
        g.extent = {L1, 0.0};
        g.h = {L1 / n1, 1.0};
        return g;
    }

    static Grid rect(int n1, int n2, double L1, double L2) {
        if (n1 < 2 || n2 < 2 || L1 <= 0.0 || L2 <= 0.0)
            throw std::invalid_argument("Grid::rect: need n1,n2 >= 2 and L1,L2 > 0");
        Grid g;
        g.dim = 2;
        g.n = {n1, n2};
        g.extent = {L1, L2};
        g.h = {L1 / n1, L2 / n2};
        return g;
    }

    std::size_t cells() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]);
    }

    double cell_measure() const {
        return dim == 1 ? h[0] : h[0] * h[1];
    }

    double domain_measure() const {
        return dim == 1 ? extent[0] : extent[0] * extent[1];
    }

    /// |Gamma|: 2 endpoints in 1D, perimeter in 2D.
    double boundary_measure() const {
        return dim == 1 ? 2.0 : 2.0 * (extent[0] + extent[1]);
    }

    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(iy) * n[0] + ix;
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && extent == o.extent;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace tvflow

#endif

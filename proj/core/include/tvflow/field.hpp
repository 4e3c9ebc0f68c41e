#ifndef TVFLOW_FIELD_HPP
#define TVFLOW_FIELD_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tvflow/grid.hpp"

namespace tvflow {

/// Cell-centered scalar field.
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), v(g.cells(), fill) {}
    ScalarField(const Grid& g, std::vector<double> values)
        : grid(g), v(std::move(values)) {
        if (v.size() != grid.cells())
            throw std::invalid_argument("ScalarField: value count != cell count");
    }

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    double min() const {
        double m = v.empty() ? 0.0 : v[0];
        for (double x : v) m = x < m ? x : m;
        return m;
    }
    double max() const {
        double m = v.empty() ? 0.0 : v[0];
        for (double x : v) m = x > m ? x : m;
        return m;
    }
};

/// Collocated vector field; component k lives on the same cell index set as
/// ScalarField and vanishes on the last cell layer along axis k (range of the
/// forward-difference gradient).
struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        for (int k = 0; k < g.dim; ++k) comp[k].assign(g.cells(), 0.0);
    }

    bool finite() const {
        for (int k = 0; k < grid.dim; ++k)
            for (double x : comp[k])
                if (!std::isfinite(x)) return false;
        return true;
    }
};

inline void check_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

// elementwise helpers used all over the solvers

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "operator+");
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "operator-");
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline ScalarField operator*(double s, const ScalarField& a) {
    ScalarField r = a;
    for (auto& x : r.v) x *= s;
    return r;
}

inline ScalarField& axpy(ScalarField& y, double a, const ScalarField& x) {
    check_same_grid(y.grid, x.grid, "axpy");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    return y;
}

}  // namespace tvflow

#endif

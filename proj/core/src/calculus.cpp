#include "tvflow/calculus.hpp"

#include <cmath>

namespace tvflow {

VectorField gradient(const ScalarField& u) {
    const Grid& g = u.grid;
    VectorField w(g);
    const int nx = g.n[0], ny = g.n[1];
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t j = g.index(ix, iy);
            w.comp[0][j] = (ix + 1 < nx) ? (u[g.index(ix + 1, iy)] - u[j]) / g.h[0] : 0.0;
            if (g.dim == 2)
                w.comp[1][j] = (iy + 1 < ny) ? (u[g.index(ix, iy + 1)] - u[j]) / g.h[1] : 0.0;
        }
    }
    return w;
}

ScalarField divergence(const VectorField& w) {
    const Grid& g = w.grid;
    ScalarField d(g);
    const int nx = g.n[0], ny = g.n[1];
    auto at = [&](const std::vector<double>& c, int ix, int iy, int k) -> double {
        // last-layer components along axis k are zero by contract
        if (k == 0 && ix == nx - 1) return 0.0;
        if (k == 1 && iy == ny - 1) return 0.0;
        return c[g.index(ix, iy)];
    };
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t j = g.index(ix, iy);
            double s = (at(w.comp[0], ix, iy, 0) -
                        (ix > 0 ? at(w.comp[0], ix - 1, iy, 0) : 0.0)) / g.h[0];
            if (g.dim == 2)
                s += (at(w.comp[1], ix, iy, 1) -
                      (iy > 0 ? at(w.comp[1], ix, iy - 1, 1) : 0.0)) / g.h[1];
            d[j] = s;
        }
    }
    return d;
}

ScalarField laplacian(const ScalarField& u) {
    return divergence(gradient(u));
}

std::vector<std::vector<double>> second_differences(const ScalarField& u) {
    const Grid& g = u.grid;
    const int nx = g.n[0], ny = g.n[1];
    VectorField grad = gradient(u);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(g.dim) * g.dim);
    for (int k = 0; k < g.dim; ++k) {
        for (int l = 0; l < g.dim; ++l) {
            std::vector<double> d(g.cells(), 0.0);
            const std::vector<double>& c = grad.comp[k];
            for (int iy = 0; iy < ny; ++iy) {
                for (int ix = 0; ix < nx; ++ix) {
                    const std::size_t j = g.index(ix, iy);
                    // backward difference with mirror ghost (zero on first layer)
                    if (l == 0)
                        d[j] = (ix > 0) ? (c[j] - c[g.index(ix - 1, iy)]) / g.h[0] : 0.0;
                    else
                        d[j] = (iy > 0) ? (c[j] - c[g.index(ix, iy - 1)]) / g.h[1] : 0.0;
                }
            }
            out.push_back(std::move(d));
        }
    }
    return out;
}

double inner(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "inner(scalar)");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid.cell_measure();
}

double inner(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid, b.grid, "inner(vector)");
    double s = 0.0;
    for (int k = 0; k < a.grid.dim; ++k)
        for (std::size_t i = 0; i < a.comp[k].size(); ++i)
            s += a.comp[k][i] * b.comp[k][i];
    return s * a.grid.cell_measure();
}

double norm_h(const ScalarField& u) { return std::sqrt(inner(u, u)); }
double norm_h(const VectorField& w) { return std::sqrt(inner(w, w)); }

double norm_v(const ScalarField& u) {
    const VectorField grad = gradient(u);
    return std::sqrt(inner(u, u) + inner(grad, grad));
}

double h2_seminorm(const ScalarField& u) {
    const auto d2 = second_differences(u);
    double s = 0.0;
    for (const auto& c : d2)
        for (double x : c) s += x * x;
    return std::sqrt(s * u.grid.cell_measure());
}

double norm_h2(const ScalarField& u) {
    const double sn = h2_seminorm(u);
    const double nv = norm_v(u);
    return std::sqrt(nv * nv + sn * sn);
}

double boundary_l2(const ScalarField& u) {
    const Grid& g = u.grid;
    const int nx = g.n[0], ny = g.n[1];
    double s = 0.0;
    if (g.dim == 1) {
        s = u[0] * u[0] + u[nx - 1] * u[nx - 1];
    } else {
        // each boundary face contributes trace^2 * face length; corner cells
        // are counted once per touching edge
        for (int iy = 0; iy < ny; ++iy) {
            s += g.h[1] * (u[g.index(0, iy)] * u[g.index(0, iy)] +
                           u[g.index(nx - 1, iy)] * u[g.index(nx - 1, iy)]);
        }
        for (int ix = 0; ix < nx; ++ix) {
            s += g.h[0] * (u[g.index(ix, 0)] * u[g.index(ix, 0)] +
                           u[g.index(ix, ny - 1)] * u[g.index(ix, ny - 1)]);
        }
    }
    return std::sqrt(s);
}

double weighted_norm(const ScalarField& beta, const VectorField& w) {
    check_same_grid(beta.grid, w.grid, "weighted_norm");
    double s = 0.0;
    for (int k = 0; k < w.grid.dim; ++k)
        for (std::size_t i = 0; i < w.comp[k].size(); ++i)
            s += beta[i] * w.comp[k][i] * w.comp[k][i];
    return std::sqrt(s * w.grid.cell_measure());
}

VectorField scale(const ScalarField& beta, const VectorField& w) {
    check_same_grid(beta.grid, w.grid, "scale");
    VectorField r = w;
    for (int k = 0; k < w.grid.dim; ++k)
        for (std::size_t i = 0; i < r.comp[k].size(); ++i)
            r.comp[k][i] *= beta[i];
    return r;
}

}  // namespace tvflow

#include "tvflow/convex.hpp"

#include <algorithm>
#include <cmath>

namespace tvflow {

namespace {
double norm2(std::span<const double> y) {
    double s = 0.0;
    for (double x : y) s += x * x;
    return s;
}
}  // namespace

double gamma(Epsilon eps, std::span<const double> y) {
    return std::sqrt(eps.value * eps.value + norm2(y));
}

void gamma_grad(Epsilon eps, std::span<const double> y, std::span<double> out) {
    eps.require_positive("gamma_grad");
    const double r = std::sqrt(eps.value * eps.value + norm2(y));
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] / r;
}

void gamma_hess(Epsilon eps, std::span<const double> y, double out[2][2]) {
    eps.require_positive("gamma_hess");
    const double q = eps.value * eps.value + norm2(y);
    const double r = std::sqrt(q);
    const std::size_t d = y.size();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out[i][j] = ((i == j ? 1.0 : 0.0) - y[i] * y[j] / q) / r;
}

double sgn_residual(std::span<const double> y, std::span<const double> w_star) {
    const double ny = std::sqrt(norm2(y));
    if (ny == 0.0) {
        const double nw = std::sqrt(norm2(w_star));
        return std::max(nw - 1.0, 0.0);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = w_star[i] - y[i] / ny;
        s += d * d;
    }
    return std::sqrt(s);
}

double phi(Epsilon eps, const ScalarField& alpha, const VectorField& w) {
    check_same_grid(alpha.grid, w.grid, "phi");
    const int dim = w.grid.dim;
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        double y[2] = {w.comp[0][j], dim == 2 ? w.comp[1][j] : 0.0};
        s += alpha[j] * gamma(eps, std::span<const double>(y, dim));
    }
    return s * alpha.grid.cell_measure();
}

double upsilon(Epsilon eps, const CoefficientSet& coeffs, const ScalarField& z) {
    check_same_grid(coeffs.grid(), z.grid, "upsilon");
    const VectorField g = gradient(z);
    double s = phi(eps, coeffs.alpha, g);
    const double wn = weighted_norm(coeffs.beta, g);
    s += 0.5 * wn * wn;
    double zero_order = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j)
        zero_order += 0.5 * coeffs.alpha_circ[j] * z[j] * z[j] - coeffs.f_circ[j] * z[j];
    return s + zero_order * z.grid.cell_measure();
}

double upsilon_kappa(double kappa, Epsilon eps, const CoefficientSet& coeffs,
                     const ScalarField& z) {
    if (!(kappa > 0.0)) throw std::invalid_argument("upsilon_kappa: kappa must be > 0");
    const ScalarField lap = laplacian(z);
    const double ln = norm_h(lap);
    return upsilon(eps, coeffs, z) + 0.5 * kappa * ln * ln;
}

}  // namespace tvflow

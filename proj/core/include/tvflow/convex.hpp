#ifndef TVFLOW_CONVEX_HPP
#define TVFLOW_CONVEX_HPP

#include <span>
#include <stdexcept>

#include "tvflow/calculus.hpp"
#include "tvflow/field.hpp"

namespace tvflow {

/// Regularization length for the smoothed Euclidean norm family.
struct Epsilon {
    double value = 0.0;
    Epsilon() = default;
    explicit Epsilon(double v) : value(v) {
        if (!(v >= 0.0)) throw std::invalid_argument("Epsilon: value must be >= 0");
    }
    bool positive() const { return value > 0.0; }
    void require_positive(const char* op) const {
        if (!positive())
            throw std::invalid_argument(std::string(op) +
                                        ": singular case eps = 0 not supported here; "
                                        "use sgn_residual / the continuation driver");
    }
};

/// gamma_eps(y) = sqrt(eps^2 + |y|^2). Defined for eps >= 0.
double gamma(Epsilon eps, std::span<const double> y);

/// grad gamma_eps(y) = y / sqrt(eps^2 + |y|^2); |result| <= 1. Requires eps > 0.
void gamma_grad(Epsilon eps, std::span<const double> y, std::span<double> out);

/// Closed-form Hessian (I - y y^T/(eps^2+|y|^2)) / sqrt(eps^2+|y|^2),
/// symmetric positive definite, every entry bounded by 1/eps. Requires eps > 0.
void gamma_hess(Epsilon eps, std::span<const double> y, double out[2][2]);

/// Distance from w_star to the set Sgn(y): |w_star - y/|y|| when y != 0,
/// max(|w_star| - 1, 0) when y = 0.
double sgn_residual(std::span<const double> y, std::span<const double> w_star);

/// Phi_eps(w) = cellMeasure * sum_j alpha_j gamma_eps(w_j). Defined for eps >= 0.
double phi(Epsilon eps, const ScalarField& alpha, const VectorField& w);

/// Coefficients of the convex elliptic problem: weight alpha >= 0,
/// pseudo-parabolic weight beta with min > 0, zeroth-order weight alpha_circ
/// with min > 0, and forcing f_circ.
struct CoefficientSet {
    ScalarField alpha, beta, alpha_circ, f_circ;

    CoefficientSet(ScalarField a, ScalarField b, ScalarField ac, ScalarField fc)
        : alpha(std::move(a)),
          beta(std::move(b)),
          alpha_circ(std::move(ac)),
          f_circ(std::move(fc)) {
        check_same_grid(alpha.grid, beta.grid, "CoefficientSet");
        check_same_grid(alpha.grid, alpha_circ.grid, "CoefficientSet");
        check_same_grid(alpha.grid, f_circ.grid, "CoefficientSet");
        if (alpha.min() < 0.0)
            throw std::invalid_argument("CoefficientSet: alpha must be >= 0");
        if (!(beta.min() > 0.0))
            throw std::invalid_argument("CoefficientSet: min(beta) must be > 0");
        if (!(alpha_circ.min() > 0.0))
            throw std::invalid_argument("CoefficientSet: min(alpha_circ) must be > 0");
    }

    double delta_star() const { return beta.min(); }
    double delta0() const { return std::min(alpha_circ.min(), beta.min()); }
    const Grid& grid() const { return alpha.grid; }
};

/// Upsilon(z) = Phi_eps(grad z) + 1/2 int beta |grad z|^2
///            + 1/2 int alpha_circ z^2 - int f_circ z.
double upsilon(Epsilon eps, const CoefficientSet& coeffs, const ScalarField& z);

/// upsilon(z) + kappa/2 |laplacian z|_H^2.
double upsilon_kappa(double kappa, Epsilon eps, const CoefficientSet& coeffs,
                     const ScalarField& z);

}  // namespace tvflow

#endif

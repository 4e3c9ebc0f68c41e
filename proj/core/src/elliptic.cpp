#include "tvflow/elliptic.hpp"

#include <cmath>
#include <vector>

namespace tvflow {

namespace {

// flux alpha * grad_gamma(grad u) + beta * grad u, collocated
VectorField nonlinear_flux(Epsilon eps, const CoefficientSet& coeffs,
                           const VectorField& grad_u) {
    const Grid& g = grad_u.grid;
    VectorField flux(g);
    for (std::size_t j = 0; j < g.cells(); ++j) {
        double y[2] = {grad_u.comp[0][j], g.dim == 2 ? grad_u.comp[1][j] : 0.0};
        double gy[2] = {0.0, 0.0};
        gamma_grad(eps, std::span<const double>(y, g.dim), std::span<double>(gy, g.dim));
        for (int k = 0; k < g.dim; ++k)
            flux.comp[k][j] = coeffs.alpha[j] * gy[k] + coeffs.beta[j] * grad_u.comp[k][j];
    }
    return flux;
}

// gradient of the objective in H: alpha_circ u - div(flux) - f_circ [+ kappa lap(lap u)]
ScalarField objective_grad(Epsilon eps, const CoefficientSet& coeffs,
                           const ScalarField& u, double kappa) {
    const VectorField grad_u = gradient(u);
    ScalarField r = divergence(nonlinear_flux(eps, coeffs, grad_u));
    for (std::size_t j = 0; j < u.size(); ++j)
        r[j] = coeffs.alpha_circ[j] * u[j] - r[j] - coeffs.f_circ[j];
    if (kappa > 0.0) {
        const ScalarField l2u = laplacian(laplacian(u));
        for (std::size_t j = 0; j < u.size(); ++j) r[j] += kappa * l2u[j];
    }
    return r;
}

// per-cell 2x2 blocks alpha_j hess_gamma(grad u_j) + beta_j I
struct HessBlocks {
    std::vector<double> m00, m01, m11;  // m01 unused in 1D
};

HessBlocks hess_blocks(Epsilon eps, const CoefficientSet& coeffs,
                       const VectorField& grad_u) {
    const Grid& g = grad_u.grid;
    HessBlocks b;
    b.m00.resize(g.cells());
    if (g.dim == 2) {
        b.m01.resize(g.cells());
        b.m11.resize(g.cells());
    }
    for (std::size_t j = 0; j < g.cells(); ++j) {
        double y[2] = {grad_u.comp[0][j], g.dim == 2 ? grad_u.comp[1][j] : 0.0};
        double h[2][2];
        gamma_hess(eps, std::span<const double>(y, g.dim), h);
        b.m00[j] = coeffs.alpha[j] * h[0][0] + coeffs.beta[j];
        if (g.dim == 2) {
            b.m01[j] = coeffs.alpha[j] * h[0][1];
            b.m11[j] = coeffs.alpha[j] * h[1][1] + coeffs.beta[j];
        }
    }
    return b;
}

// H p = alpha_circ p - div(M grad p) [+ kappa lap(lap p)], SPD in the H inner product
ScalarField hess_apply(const CoefficientSet& coeffs, const HessBlocks& blocks,
                       const ScalarField& p, double kappa) {
    const Grid& g = p.grid;
    const VectorField grad_p = gradient(p);
    VectorField flux(g);
    for (std::size_t j = 0; j < g.cells(); ++j) {
        if (g.dim == 1) {
            flux.comp[0][j] = blocks.m00[j] * grad_p.comp[0][j];
        } else {
            flux.comp[0][j] =
                blocks.m00[j] * grad_p.comp[0][j] + blocks.m01[j] * grad_p.comp[1][j];
            flux.comp[1][j] =
                blocks.m01[j] * grad_p.comp[0][j] + blocks.m11[j] * grad_p.comp[1][j];
        }
    }
    ScalarField r = divergence(flux);
    for (std::size_t j = 0; j < p.size(); ++j)
        r[j] = coeffs.alpha_circ[j] * p[j] - r[j];
    if (kappa > 0.0) {
        const ScalarField l2p = laplacian(laplacian(p));
        for (std::size_t j = 0; j < p.size(); ++j) r[j] += kappa * l2p[j];
    }
    return r;
}

// CG for H d = rhs, returns d
ScalarField conjugate_gradient(const CoefficientSet& coeffs, const HessBlocks& blocks,
                               const ScalarField& rhs, double kappa, int max_iter,
                               double rel_tol) {
    ScalarField d(rhs.grid, 0.0);
    ScalarField r = rhs;
    ScalarField p = r;
    double rr = inner(r, r);
    const double stop2 = rel_tol * rel_tol * rr;
    for (int it = 0; it < max_iter && rr > stop2 && rr > 0.0; ++it) {
        const ScalarField hp = hess_apply(coeffs, blocks, p, kappa);
        const double php = inner(p, hp);
        if (!(php > 0.0)) break;  // numerically flat direction
        const double a = rr / php;
        axpy(d, a, p);
        axpy(r, -a, hp);
        const double rr_new = inner(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = r[j] + beta * p[j];
    }
    return d;
}

EllipticSolution solve_convex(double kappa, Epsilon eps, const CoefficientSet& coeffs,
                              const SolverConfig& cfg, const ScalarField* initial,
                              std::ostream* diag) {
    cfg.validate();
    eps.require_positive("solve_e");
    const Grid& g = coeffs.grid();

    auto energy = [&](const ScalarField& z) {
        return kappa > 0.0 ? upsilon_kappa(kappa, eps, coeffs, z)
                           : upsilon(eps, coeffs, z);
    };

    ScalarField u(g);
    if (initial) {
        check_same_grid(initial->grid, g, "solve_e initial guess");
        u = *initial;
    } else {
        for (std::size_t j = 0; j < u.size(); ++j)
            u[j] = coeffs.f_circ[j] / coeffs.alpha_circ[j];
        if (!u.finite()) u = ScalarField(g, 0.0);
    }

    const double tol = cfg.tol_rel * (1.0 + norm_h(coeffs.f_circ));
    const int max_cg = cfg.max_cg > 0 ? cfg.max_cg : 10 * static_cast<int>(g.cells());

    double e = energy(u);
    double res = 0.0;
    int iter = 0;
    for (; iter <= cfg.max_newton; ++iter) {
        ScalarField grad = objective_grad(eps, coeffs, u, kappa);
        res = norm_h(grad);
        if (diag) *diag << iter << "," << e << "," << res << "\n";
        if (res <= tol) break;
        if (iter == cfg.max_newton)
            throw SolverError("solve_e: Newton iteration cap reached", res, iter);

        const HessBlocks blocks = hess_blocks(eps, coeffs, gradient(u));
        ScalarField rhs = -1.0 * grad;
        ScalarField d = conjugate_gradient(coeffs, blocks, rhs, kappa, max_cg, 1e-12);
        double slope = inner(grad, d);
        if (!(slope < 0.0)) {  // fall back to steepest descent
            d = rhs;
            slope = -inner(grad, grad);
        }

        double t = 1.0;
        ScalarField trial = u;
        axpy(trial, t, d);
        double e_trial = energy(trial);
        while (e_trial > e + cfg.sufficient_decrease * t * slope && t > 1e-14) {
            t *= cfg.backtrack;
            trial = u;
            axpy(trial, t, d);
            e_trial = energy(trial);
        }
        if (!(e_trial < e)) {
            // energy differences at rounding level: fall back to accepting a
            // residual-decreasing full Newton step
            ScalarField full = u;
            axpy(full, 1.0, d);
            const double res_full = norm_h(objective_grad(eps, coeffs, full, kappa));
            if (res_full < res) {
                u = std::move(full);
                e = energy(u);
                continue;
            }
            throw SolverError("solve_e: line search stalled", res, iter);
        }
        u = std::move(trial);
        e = e_trial;
    }

    // discrete analogue of the V-bound (delta0/2)|u|_V^2 <= (1/2 delta0)|f|_H^2
    const double d0 = coeffs.delta0();
    const double nv = norm_v(u);
    const double nf = norm_h(coeffs.f_circ);
    if (d0 * nv * nv > nf * nf / d0 + 1e-8)
        throw SolverError("solve_e: V-bound violated on solver output", res, iter);

    EllipticSolution sol;
    sol.u = std::move(u);
    sol.residual_norm = res;
    sol.newton_iters = iter;
    sol.energy = e;
    return sol;
}

}  // namespace

double weak_residual(Epsilon eps, const CoefficientSet& coeffs, const ScalarField& u) {
    eps.require_positive("weak_residual");
    check_same_grid(coeffs.grid(), u.grid, "weak_residual");
    return norm_h(objective_grad(eps, coeffs, u, 0.0));
}

EllipticSolution solve_e(Epsilon eps, const CoefficientSet& coeffs,
                         const SolverConfig& cfg, const ScalarField* initial,
                         std::ostream* diag) {
    return solve_convex(0.0, eps, coeffs, cfg, initial, diag);
}

EllipticSolution solve_e_kappa(double kappa, Epsilon eps, const CoefficientSet& coeffs,
                               const SolverConfig& cfg, const ScalarField* initial,
                               std::ostream* diag) {
    if (!(kappa > 0.0)) throw std::invalid_argument("solve_e_kappa: kappa must be > 0");
    return solve_convex(kappa, eps, coeffs, cfg, initial, diag);
}

}  // namespace tvflow

#ifndef TVFLOW_ELLIPTIC_HPP
#define TVFLOW_ELLIPTIC_HPP

#include <optional>
#include <ostream>
#include <stdexcept>

#include "tvflow/convex.hpp"

namespace tvflow {

struct SolverConfig {
    double tol_rel = 1e-10;            // residual tolerance relative to 1 + |f_circ|_H
    int max_newton = 100;
    int max_cg = 0;                    // 0 -> 10 * cells
    double backtrack = 0.5;
    double sufficient_decrease = 1e-4;

    void validate() const {
        if (!(tol_rel > 0.0 && tol_rel < 1.0))
            throw std::invalid_argument("SolverConfig: tol_rel must be in (0,1)");
        if (max_newton <= 0 || max_cg < 0 || !(backtrack > 0.0 && backtrack < 1.0) ||
            !(sufficient_decrease > 0.0))
            throw std::invalid_argument("SolverConfig: invalid parameter");
    }
};

struct EllipticSolution {
    ScalarField u;
    double residual_norm = 0.0;
    int newton_iters = 0;
    double energy = 0.0;
};

class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& msg, double last_residual, int iters)
        : std::runtime_error(msg), last_residual_(last_residual), iters_(iters) {}
    double last_residual() const { return last_residual_; }
    int iters() const { return iters_; }

  private:
    double last_residual_;
    int iters_;
};

/// |alpha_circ u - div(alpha grad_gamma(grad u) + beta grad u) - f_circ|_H,
/// which by exact adjointness equals the variational defect of the weak form.
double weak_residual(Epsilon eps, const CoefficientSet& coeffs, const ScalarField& u);

/// Minimize upsilon by damped Newton with CG inner solves. Requires eps > 0.
/// Optional initial guess and a CSV diagnostics stream (iter,energy,residual).
EllipticSolution solve_e(Epsilon eps, const CoefficientSet& coeffs,
                         const SolverConfig& cfg,
                         const ScalarField* initial = nullptr,
                         std::ostream* diag = nullptr);

/// Minimize upsilon_kappa; the Newton system gains the biharmonic term.
EllipticSolution solve_e_kappa(double kappa, Epsilon eps, const CoefficientSet& coeffs,
                               const SolverConfig& cfg,
                               const ScalarField* initial = nullptr,
                               std::ostream* diag = nullptr);

}  // namespace tvflow

#endif

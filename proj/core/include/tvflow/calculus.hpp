#ifndef TVFLOW_CALCULUS_HPP
#define TVFLOW_CALCULUS_HPP

#include "tvflow/field.hpp"

namespace tvflow {

// Discrete calculus with exact summation by parts: divergence is the exact
// negative adjoint of gradient under the unweighted discrete inner products,
// so the Green identity (div w, u)_H + (w, grad u) = 0 holds to rounding.

/// Forward-difference gradient with mirror ghost cells: component k is
/// (u_{j+e_k} - u_j)/h_k, zero on the last cell layer along axis k.
VectorField gradient(const ScalarField& u);

/// Negative adjoint of gradient. Last-layer components of w are treated as
/// zero (enforced, not assumed).
ScalarField divergence(const VectorField& w);

/// divergence(gradient(u)); the induced A_N = -laplacian is symmetric PSD
/// with kernel = constants.
ScalarField laplacian(const ScalarField& u);

/// All composed forward/backward second differences D_l^- D_k^+ u, laid out
/// as dim*dim component arrays (row k, column l). Monitoring only.
std::vector<std::vector<double>> second_differences(const ScalarField& u);

double inner(const ScalarField& a, const ScalarField& b);   // (.,.)_H
double inner(const VectorField& a, const VectorField& b);   // (.,.)_{[H]^N}

double norm_h(const ScalarField& u);
double norm_h(const VectorField& w);
double norm_v(const ScalarField& u);        // (|u|_H^2 + |grad u|^2)^{1/2}
double h2_seminorm(const ScalarField& u);   // |second differences|
double norm_h2(const ScalarField& u);       // full discrete H^2 norm
double boundary_l2(const ScalarField& u);   // |u|_{L^2(Gamma)} via boundary cell traces

/// |sqrt(beta) w|_{[H]^N} for a cellwise weight beta >= 0.
double weighted_norm(const ScalarField& beta, const VectorField& w);

/// Componentwise cell-weighted product (beta * w).
VectorField scale(const ScalarField& beta, const VectorField& w);

}  // namespace tvflow

#endif

#ifndef TVFLOW_ANALYSIS_HPP
#define TVFLOW_ANALYSIS_HPP

#include <cstdint>
#include <ostream>
#include <string>

#include "tvflow/flow.hpp"

namespace tvflow {

/// Closed-form constants of the discrete energy estimates, evaluated from the
/// run data, plus the measured embedding constant.
struct EstimateConstants {
    double c0 = 0.0;        // measured: |u|_{H2,h}^2 <= C0 (|u|_H^2 + |A_N u|_H^2)
    double c3 = 0.0;        // 2(|beta|_inf + 1)/(delta_* ^ 1) e^{2T}
    double c4 = 0.0;        // |alpha|_H^2 + measure(Omega) + 1
    double c5 = 0.0;
    double c6 = 0.0;
    double c1_tilde = 0.0;  // C1(1/(2 C0))
    double c2_tilde = 0.0;
    double cstar_tilde = 0.0;
    double delta_star = 0.0;
    double delta1 = 0.0;    // delta_0 analogue threshold delta_*/(4 C0)
    double tau_star = 0.0;  // Gronwall guard min{tau_0, 1/(2 Cstar_tilde)}
    double c_r = 0.0;       // trace constant estimate used inside C1(delta)
};

struct EstimateStepRow {
    int i = 0;
    double x = 0.0, y = 0.0;
    double v_sq = 0.0;       // |u_i|_V^2
    double h2_sq = 0.0;      // |u_i|_{H2,h}^2
    double diss_lhs = 0.0, diss_rhs = 0.0;
    double lem41a_margin = 0.0;  // C3 bound minus |u_i|_V^2
    double gronwall_margin = 0.0;  // tau (X_i + |f_i|^2) - (X_i - X_{i-1})
};

struct EstimateReport {
    std::vector<EstimateStepRow> per_step;
    EstimateConstants constants;
    // asserted bounds
    bool lem41a_ok = false;   // |u_i|_V^2 <= C3 (|u0|_V^2 + |f|^2 + 1), all i
    bool lem41b_ok = false;   // summed C4 bound
    bool gronwall_premise_ok = false;  // (X_i - X_{i-1})/tau <= X_i + |f_i|^2
    bool gronwall_conclusion_ok = false;  // X_i <= e^{2T}(X_0 + |f|^2 + 1)
    bool dissipation_ok = false;
    // reported bounds (margins may be negative; not asserted)
    double lem41b_margin = 0.0;
    double lem42_margin = 0.0;  // C5 bound minus max_i |u_i|_{H2,h}^2
    double lem43_margin = 0.0;  // (C6/(eps^2 ^ 1)) bound minus the H2 rate sum
    bool tau_exceeds_tau_star = false;

    bool asserted_ok() const {
        return lem41a_ok && lem41b_ok && gronwall_premise_ok &&
               gronwall_conclusion_ok && dissipation_ok;
    }
    void to_csv(std::ostream& os) const;
};

/// Fill all per-step rows and evaluate the closed-form constants; asserted
/// bounds are flagged, the boundary-geometry-dependent ones only reported.
EstimateReport energy_ledger(const FlowResult& result, const FlowProblem& prob,
                             double dissipation_slack);

struct StabilityGap {
    std::vector<double> lhs, rhs;  // per node
    bool ok = false;               // lhs <= rhs (1 + 1e-6) at every node
};

/// Gronwall stability of two trajectories on the same grid/tau/eps:
/// |du(t)|_H^2 + |sqrt(beta) grad du(t)|^2 <= e^T (|du0|^2 terms + |df|^2).
StabilityGap stability_gap(const FlowResult& a, const FlowResult& b,
                           const FlowProblem& prob_a, const FlowProblem& prob_b);

struct MoscoProbe {
    double m1_margin = 0.0;     // liminf Phi_{eps_n}(w_n) - Phi_0(w)
    double m2_worst_gap = 0.0;  // max_n (Phi_{eps_n}(w) - Phi_0(w) - eps_n |alpha|_L1)
    bool ok(double tol = 1e-8) const { return m1_margin >= -tol && m2_worst_gap <= tol; }
};

MoscoProbe mosco_probe(const ScalarField& alpha, const std::vector<VectorField>& w_seq,
                       const VectorField& w_limit, std::span<const double> eps_seq);

/// Smallest C_r with |v|_{L2(Gamma)}^2 <= r |grad v|^2 + C_r |v|_H^2 over a
/// randomized field sample (seeded).
double trace_inequality_check(const Grid& grid, double r, int samples,
                              std::uint64_t seed = 0x7f4a7c15);

/// Smallest C0 with |u|_{H2,h}^2 <= C0 (|u|_H^2 + |A_N u|_H^2) over a
/// randomized sample on the given grid.
double embedding_constant(const Grid& grid, int samples,
                          std::uint64_t seed = 0x9e3779b9);

/// Lemma-3.2-type probe value: (div(alpha grad_gamma(grad v)), lap v)_H
/// + delta |d2 v|^2 + c1 (|v|_V^2 + 1); nonnegative when the estimate holds.
double lemma32_quantity(Epsilon eps, const ScalarField& alpha, const ScalarField& v,
                        double delta, double c1);

/// C1(delta) with zero boundary curvature (flat rectangles): the curvature
/// prefactor collapses to 1 and the trace constant is estimated numerically.
double c1_of_delta(double delta, const ScalarField& alpha, double c_r);

struct ConvergenceStudy {
    std::string axis;  // "tau" or "eps"
    std::vector<double> levels, gaps, rates;
    void to_csv(std::ostream& os) const;
};

/// Successive-gap study in the discrete C([0,T];V) norm via linear
/// interpolants; tau-axis rates ~ 1 for the first-order scheme.
ConvergenceStudy convergence_study(const std::string& axis, const FlowProblem& prob,
                                   std::span<const double> levels,
                                   const SolverConfig& cfg);

}  // namespace tvflow

#endif

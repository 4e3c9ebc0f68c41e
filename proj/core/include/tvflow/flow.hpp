#ifndef TVFLOW_FLOW_HPP
#define TVFLOW_FLOW_HPP

#include <cmath>
#include <span>
#include <vector>

#include "tvflow/elliptic.hpp"

namespace tvflow {

/// Time forcing: identically zero, constant in time, or a piecewise-constant
/// sample sequence on a uniform time grid of width sample_dt covering (0, T).
struct Forcing {
    enum class Kind { Zero, Constant, Samples };
    Kind kind = Kind::Zero;
    ScalarField constant;
    std::vector<ScalarField> samples;
    double sample_dt = 0.0;

    static Forcing zero() { return Forcing{}; }
    static Forcing constant_in_time(ScalarField f) {
        Forcing r;
        r.kind = Kind::Constant;
        r.constant = std::move(f);
        return r;
    }
    static Forcing sampled(std::vector<ScalarField> s, double dt) {
        if (s.empty()) throw std::invalid_argument("Forcing::sampled: empty sample set");
        if (!(dt > 0.0)) throw std::invalid_argument("Forcing::sampled: dt must be > 0");
        Forcing r;
        r.kind = Kind::Samples;
        r.samples = std::move(s);
        r.sample_dt = dt;
        return r;
    }
};

struct FlowProblem {
    Grid grid;
    ScalarField u0, alpha, beta;
    Forcing f;
    double T = 1.0;
    double tau = 0.1;
    Epsilon eps{1.0};

    int n_tau() const { return static_cast<int>(std::ceil(T / tau - 1e-12)); }

    void validate() const;
};

struct LedgerRow {
    int i = 0;
    double t = 0.0;
    double x = 0.0;              // X_i = |u_i|_H^2 + |sqrt(beta) grad u_i|^2
    double y = 0.0;              // Y_i = |grad u_i|^2 + int beta |lap u_i|^2 + Phi_eps
    double phi = 0.0;            // Phi_eps(grad u_i)
    double diss_lhs = 0.0;       // per-step dissipation inequality, both sides
    double diss_rhs = 0.0;
    double residual = 0.0;       // elliptic weak residual of the step
    double energy = 0.0;         // Upsilon value of the step problem
    double f_norm = 0.0;         // |f_i|_H
};

struct FlowResult {
    std::vector<ScalarField> states;  // u_0 .. u_{n_tau}
    std::vector<LedgerRow> ledger;    // rows 0 .. n_tau (row 0 has no step data)
    std::vector<VectorField> omega_star;      // filled by the singular driver
    std::vector<double> eps_levels, eps_gaps; // continuation metadata
    double eps_final = 0.0;
    double tau = 0.0;
    double t_end = 0.0;               // T_tau = n_tau * tau
};

/// f_0 = 0; f_i = mean of f over ((i-1) tau, i tau], exact for the
/// piecewise-constant sample representation.
std::vector<ScalarField> sample_forcing(const Forcing& f, const Grid& grid,
                                        double tau, double T);

/// One implicit step: solve_e with alpha_circ <- 1/tau, beta <- beta/tau,
/// f_circ <- f_i + u_prev/tau - div(beta grad u_prev)/tau.
ScalarField step_ap(const ScalarField& u_prev, const ScalarField& f_i,
                    const FlowProblem& prob, const SolverConfig& cfg,
                    LedgerRow* row = nullptr);

/// Iterate step_ap for i = 1..n_tau, asserting the per-step dissipation
/// inequality with slack 10 * tol_rel * (1 + |f_circ|_H).
FlowResult run_flow(const FlowProblem& prob, const SolverConfig& cfg);

/// eps -> 0 continuation: run_flow at each schedule level until the
/// trajectory gap in the discrete V norm drops below tol_limit; extract
/// omega_star = gamma_grad(eps_K, grad u_i).
FlowResult run_singular_flow(const FlowProblem& prob,
                             std::span<const double> eps_schedule,
                             double tol_limit, const SolverConfig& cfg);

/// Default continuation schedule eps_k = 2^-k, k = 0..levels.
std::vector<double> default_eps_schedule(int levels);

/// The three time interpolants of a trajectory.
class Interpolants {
  public:
    Interpolants(const FlowResult& result, double tau);
    ScalarField forward(double t) const;   // right-continuous on (t_{i-1}, t_i]
    ScalarField backward(double t) const;  // left-shifted
    ScalarField linear(double t) const;
    double t_end() const { return t_end_; }

  private:
    void check_range(double t) const;
    const std::vector<ScalarField>& states_;
    double tau_, t_end_;
};

}  // namespace tvflow

#endif

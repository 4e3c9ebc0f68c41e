#include "tvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tvflow {

void FlowProblem::validate() const {
    if (!(T > 0.0) || !(tau > 0.0) || tau > T)
        throw std::invalid_argument("FlowProblem: need tau in (0, T]");
    check_same_grid(u0.grid, grid, "FlowProblem.u0");
    check_same_grid(alpha.grid, grid, "FlowProblem.alpha");
    check_same_grid(beta.grid, grid, "FlowProblem.beta");
    if (alpha.min() < 0.0) throw std::invalid_argument("FlowProblem: alpha must be >= 0");
    if (!(beta.min() > 0.0)) throw std::invalid_argument("FlowProblem: min(beta) must be > 0");
    if (!u0.finite()) throw std::invalid_argument("FlowProblem: u0 must be finite");
}

std::vector<ScalarField> sample_forcing(const Forcing& f, const Grid& grid,
                                        double tau, double T) {
    if (!(tau > 0.0) || !(T > 0.0))
        throw std::invalid_argument("sample_forcing: need tau, T > 0");
    const int n = static_cast<int>(std::ceil(T / tau - 1e-12));
    std::vector<ScalarField> out;
    out.reserve(n + 1);
    out.emplace_back(grid, 0.0);  // f_0 = 0
    for (int i = 1; i <= n; ++i) {
        switch (f.kind) {
            case Forcing::Kind::Zero:
                out.emplace_back(grid, 0.0);
                break;
            case Forcing::Kind::Constant:
                check_same_grid(f.constant.grid, grid, "sample_forcing");
                out.push_back(f.constant);
                break;
            case Forcing::Kind::Samples: {
                // exact mean over ((i-1) tau, i tau] of the piecewise-constant
                // representation; samples extend by their last value past T
                const double a = (i - 1) * tau, b = i * tau;
                ScalarField mean(grid, 0.0);
                const int m = static_cast<int>(f.samples.size());
                for (int j = 0;; ++j) {
                    const double s0 = j * f.sample_dt;
                    const double s1 = (j + 1 < m) ? (j + 1) * f.sample_dt
                                                  : std::max(b, s0 + f.sample_dt);
                    const double lo = std::max(a, s0), hi = std::min(b, s1);
                    if (hi > lo) {
                        const ScalarField& s = f.samples[std::min(j, m - 1)];
                        check_same_grid(s.grid, grid, "sample_forcing");
                        axpy(mean, (hi - lo) / tau, s);
                    }
                    if (s1 >= b || j >= m - 1) break;
                }
                out.push_back(std::move(mean));
                break;
            }
        }
    }
    return out;
}

namespace {

CoefficientSet step_coefficients(const ScalarField& u_prev, const ScalarField& f_i,
                                 const FlowProblem& prob) {
    const double tau = prob.tau;
    ScalarField alpha_circ(prob.grid, 1.0 / tau);
    ScalarField beta_step = (1.0 / tau) * prob.beta;
    ScalarField f_circ = divergence(scale(prob.beta, gradient(u_prev)));
    for (std::size_t j = 0; j < f_circ.size(); ++j)
        f_circ[j] = f_i[j] + u_prev[j] / tau - f_circ[j] / tau;
    return CoefficientSet(prob.alpha, std::move(beta_step), std::move(alpha_circ),
                          std::move(f_circ));
}

double beta_weighted_lap_sq(const ScalarField& beta, const ScalarField& u) {
    const ScalarField lap = laplacian(u);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += beta[j] * lap[j] * lap[j];
    return s * u.grid.cell_measure();
}

LedgerRow make_row(int i, const FlowProblem& prob, const ScalarField& u) {
    LedgerRow row;
    row.i = i;
    row.t = i * prob.tau;
    const VectorField grad = gradient(u);
    const double nh = norm_h(u);
    const double wg = weighted_norm(prob.beta, grad);
    row.x = nh * nh + wg * wg;
    const double ng = norm_h(grad);
    row.phi = phi(prob.eps, prob.alpha, grad);
    row.y = ng * ng + beta_weighted_lap_sq(prob.beta, u) + row.phi;
    return row;
}

}  // namespace

ScalarField step_ap(const ScalarField& u_prev, const ScalarField& f_i,
                    const FlowProblem& prob, const SolverConfig& cfg, LedgerRow* row) {
    prob.eps.require_positive("step_ap");
    const CoefficientSet coeffs = step_coefficients(u_prev, f_i, prob);
    const EllipticSolution sol = solve_e(prob.eps, coeffs, cfg, &u_prev);

    if (row) {
        *row = make_row(row->i, prob, sol.u);
        row->residual = sol.residual_norm;
        row->energy = sol.energy;
        row->f_norm = norm_h(f_i);

        const ScalarField diff = sol.u - u_prev;
        const VectorField grad_diff = gradient(diff);
        const double dh = norm_h(diff), dg = norm_h(grad_diff);
        const double delta_star = prob.beta.min();
        row->diss_lhs = dh * dh / (2.0 * prob.tau) +
                        delta_star * dg * dg / prob.tau + row->phi;
        row->diss_rhs = phi(prob.eps, prob.alpha, gradient(u_prev)) +
                        0.5 * prob.tau * row->f_norm * row->f_norm;
        const double slack = 10.0 * cfg.tol_rel * (1.0 + norm_h(coeffs.f_circ));
        if (row->diss_lhs > row->diss_rhs + slack)
            throw SolverError("step_ap: per-step dissipation inequality violated",
                              row->diss_lhs - row->diss_rhs, row->i);
    }
    return sol.u;
}

FlowResult run_flow(const FlowProblem& prob, const SolverConfig& cfg) {
    prob.validate();
    prob.eps.require_positive("run_flow");
    const int n = prob.n_tau();
    const std::vector<ScalarField> f = sample_forcing(prob.f, prob.grid, prob.tau, prob.T);

    FlowResult result;
    result.tau = prob.tau;
    result.t_end = n * prob.tau;
    result.eps_final = prob.eps.value;
    result.states.reserve(n + 1);
    result.states.push_back(prob.u0);
    result.ledger.push_back(make_row(0, prob, prob.u0));

    for (int i = 1; i <= n; ++i) {
        LedgerRow row;
        row.i = i;
        ScalarField u = step_ap(result.states.back(), f[i], prob, cfg, &row);
        result.states.push_back(std::move(u));
        result.ledger.push_back(row);
    }
    return result;
}

std::vector<double> default_eps_schedule(int levels) {
    std::vector<double> s;
    for (int k = 0; k <= levels; ++k) s.push_back(std::pow(2.0, -k));
    return s;
}

FlowResult run_singular_flow(const FlowProblem& prob,
                             std::span<const double> eps_schedule,
                             double tol_limit, const SolverConfig& cfg) {
    if (eps_schedule.empty())
        throw std::invalid_argument("run_singular_flow: empty schedule");
    for (std::size_t k = 1; k < eps_schedule.size(); ++k)
        if (!(eps_schedule[k] < eps_schedule[k - 1]) || !(eps_schedule[k] > 0.0))
            throw std::invalid_argument(
                "run_singular_flow: schedule must be strictly decreasing and positive");

    FlowResult prev, curr;
    std::vector<double> levels, gaps;
    bool converged = false;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
        FlowProblem p = prob;
        p.eps = Epsilon(eps_schedule[k]);
        curr = run_flow(p, cfg);
        levels.push_back(eps_schedule[k]);
        if (k > 0) {
            gap = 0.0;
            for (std::size_t i = 0; i < curr.states.size(); ++i)
                gap = std::max(gap, norm_v(curr.states[i] - prev.states[i]));
            gaps.push_back(gap);
            if (gap <= tol_limit) {
                converged = true;
                break;
            }
        }
        prev = curr;
    }
    if (!converged)
        throw SolverError("run_singular_flow: schedule exhausted, achieved gap " +
                              std::to_string(gap),
                          gap, static_cast<int>(eps_schedule.size()));

    curr.eps_levels = std::move(levels);
    curr.eps_gaps = std::move(gaps);
    const Epsilon eps_k(curr.eps_final);
    curr.omega_star.clear();
    curr.omega_star.reserve(curr.states.size());
    for (const ScalarField& u : curr.states) {
        const VectorField grad = gradient(u);
        VectorField w(u.grid);
        for (std::size_t j = 0; j < u.size(); ++j) {
            double y[2] = {grad.comp[0][j], u.grid.dim == 2 ? grad.comp[1][j] : 0.0};
            double gy[2] = {0.0, 0.0};
            gamma_grad(eps_k, std::span<const double>(y, u.grid.dim),
                       std::span<double>(gy, u.grid.dim));
            for (int c = 0; c < u.grid.dim; ++c) w.comp[c][j] = gy[c];
        }
        curr.omega_star.push_back(std::move(w));
    }
    return curr;
}

Interpolants::Interpolants(const FlowResult& result, double tau)
    : states_(result.states), tau_(tau) {
    if (states_.empty()) throw std::invalid_argument("Interpolants: empty trajectory");
    t_end_ = (static_cast<double>(states_.size()) - 1.0) * tau_;
}

void Interpolants::check_range(double t) const {
    if (t < 0.0 || t > t_end_ + 1e-12)
        throw std::out_of_range("Interpolants: t outside [0, n_tau * tau]");
}

ScalarField Interpolants::forward(double t) const {
    check_range(t);
    if (t <= 0.0) return states_.front();
    const int i = std::min<int>(static_cast<int>(std::ceil(t / tau_ - 1e-12)),
                                static_cast<int>(states_.size()) - 1);
    return states_[i];
}

ScalarField Interpolants::backward(double t) const {
    check_range(t);
    if (t <= 0.0) return states_.front();
    const int i = std::min<int>(static_cast<int>(std::ceil(t / tau_ - 1e-12)) - 1,
                                static_cast<int>(states_.size()) - 1);
    return states_[std::max(i, 0)];
}

ScalarField Interpolants::linear(double t) const {
    check_range(t);
    const int last = static_cast<int>(states_.size()) - 1;
    const int i = std::min(static_cast<int>(std::floor(t / tau_)), last - 1 >= 0 ? last - 1 : 0);
    const double t_i = i * tau_;
    const double w = std::clamp((t - t_i) / tau_, 0.0, 1.0);
    if (i + 1 > last) return states_[last];
    ScalarField r = (1.0 - w) * states_[i];
    axpy(r, w, states_[i + 1]);
    return r;
}

}  // namespace tvflow

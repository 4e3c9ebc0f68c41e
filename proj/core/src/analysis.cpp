#include "tvflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tvflow {

namespace {

double sup_norm(const ScalarField& u) {
    double m = 0.0;
    for (double x : u.v) m = std::max(m, std::abs(x));
    return m;
}

double grad_sup_norm(const ScalarField& u) {
    const VectorField g = gradient(u);
    double m = 0.0;
    for (int k = 0; k < u.grid.dim; ++k)
        for (double x : g.comp[k]) m = std::max(m, std::abs(x));
    return m;
}

double l1_norm(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s += std::abs(x);
    return s * u.grid.cell_measure();
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ScalarField u(g);
    for (auto& x : u.v) x = dist(rng);
    return u;
}

}  // namespace

double embedding_constant(const Grid& grid, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double c0 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const ScalarField u = random_field(grid, rng);
        const double h2 = norm_h2(u);
        const double nh = norm_h(u);
        const double nl = norm_h(laplacian(u));
        const double denom = nh * nh + nl * nl;
        if (denom > 0.0) c0 = std::max(c0, h2 * h2 / denom);
    }
    return c0;
}

double trace_inequality_check(const Grid& grid, double r, int samples,
                              std::uint64_t seed) {
    if (!(r > 0.0)) throw std::invalid_argument("trace_inequality_check: r must be > 0");
    std::mt19937_64 rng(seed);
    double c_r = 0.0;
    for (int s = 0; s < samples; ++s) {
        // sample 0 is the constant field, pinning c_r >= |Gamma|/|Omega|
        const ScalarField v = s == 0 ? ScalarField(grid, 1.0) : random_field(grid, rng);
        const double nh = norm_h(v);
        if (nh == 0.0) continue;
        const double tr = boundary_l2(v);
        const double ng = norm_h(gradient(v));
        c_r = std::max(c_r, (tr * tr - r * ng * ng) / (nh * nh));
    }
    return c_r;
}

double c1_of_delta(double delta, const ScalarField& alpha, double c_r) {
    // flat boundary: C_Gamma = 0, so the curvature prefactor is 1
    const Grid& g = alpha.grid;
    const double alpha_v_sq = norm_v(alpha) * norm_v(alpha);
    return (c_r + g.boundary_measure() + g.dim * alpha_v_sq) /
           (2.0 * std::min(delta, 1.0));
}

double lemma32_quantity(Epsilon eps, const ScalarField& alpha, const ScalarField& v,
                        double delta, double c1) {
    eps.require_positive("lemma32_quantity");
    const VectorField grad_v = gradient(v);
    VectorField flux(v.grid);
    for (std::size_t j = 0; j < v.size(); ++j) {
        double y[2] = {grad_v.comp[0][j], v.grid.dim == 2 ? grad_v.comp[1][j] : 0.0};
        double gy[2] = {0.0, 0.0};
        gamma_grad(eps, std::span<const double>(y, v.grid.dim),
                   std::span<double>(gy, v.grid.dim));
        for (int k = 0; k < v.grid.dim; ++k) flux.comp[k][j] = alpha[j] * gy[k];
    }
    const double term = inner(divergence(flux), laplacian(v));
    const double sn = h2_seminorm(v);
    const double nv = norm_v(v);
    return term + delta * sn * sn + c1 * (nv * nv + 1.0);
}

EstimateReport energy_ledger(const FlowResult& result, const FlowProblem& prob,
                             double dissipation_slack) {
    if (result.states.empty())
        throw std::invalid_argument("energy_ledger: empty trajectory");
    EstimateReport rep;
    EstimateConstants& c = rep.constants;

    const double t_end = result.t_end;
    const double tau = result.tau;
    const int n = static_cast<int>(result.states.size()) - 1;
    const double eps = prob.eps.value;

    double f_sq = 0.0;  // tau sum |f_i|_H^2 ~ |f|^2_{L^2(0,T;H)}
    for (int i = 1; i <= n; ++i)
        f_sq += tau * result.ledger[i].f_norm * result.ledger[i].f_norm;

    c.delta_star = prob.beta.min();
    const double beta_inf = sup_norm(prob.beta);
    const double grad_beta_inf = grad_sup_norm(prob.beta);
    const double alpha_h_sq = norm_h(prob.alpha) * norm_h(prob.alpha);
    const double alpha_inf = sup_norm(prob.alpha);
    const double u0_v_sq = norm_v(prob.u0) * norm_v(prob.u0);
    const double u0_h2_sq = norm_h2(prob.u0) * norm_h2(prob.u0);
    const double meas = prob.grid.domain_measure();
    const int dim = prob.grid.dim;

    c.c0 = embedding_constant(prob.grid, 64);
    c.c_r = trace_inequality_check(prob.grid, 1.0, 64);
    c.c1_tilde = c1_of_delta(1.0 / (2.0 * c.c0), prob.alpha, c.c_r);
    c.c3 = 2.0 * (beta_inf + 1.0) / std::min(c.delta_star, 1.0) * std::exp(2.0 * t_end);
    c.c4 = alpha_h_sq + meas + 1.0;
    c.cstar_tilde = std::max(
        2.0, 2.0 * c.c3 / std::min(c.delta_star * c.delta_star, 1.0) *
                 (grad_beta_inf * grad_beta_inf + 1.0) * (c.c1_tilde + 1.0) *
                 (u0_v_sq + f_sq + 1.0));
    c.tau_star = std::min(0.5, 1.0 / (2.0 * c.cstar_tilde));
    c.c5 = 2.0 * c.c0 * c.c3 * c.cstar_tilde * std::exp(2.0 * c.cstar_tilde * t_end) *
           (dim * beta_inf + alpha_h_sq + meas + t_end + 2.0);
    c.c2_tilde = (c.c4 * grad_beta_inf * grad_beta_inf +
                  (dim * dim + 1.0) * (t_end + 1.0) *
                      (c.c5 * alpha_inf * alpha_inf + norm_v(prob.alpha) * norm_v(prob.alpha)) +
                  1.0) /
                 std::min(c.delta_star * c.delta_star, 1.0);
    c.c6 = c.c0 * (4.0 * c.c2_tilde / c.delta_star + c.c4);
    c.delta1 = c.delta_star / (4.0 * c.c0);

    rep.tau_exceeds_tau_star = tau > c.tau_star;

    const double lem41a_bound = c.c3 * (u0_v_sq + f_sq + 1.0);
    const double gronwall_bound =
        std::exp(2.0 * t_end) * (result.ledger[0].x + f_sq + 1.0);

    rep.lem41a_ok = rep.gronwall_premise_ok = rep.gronwall_conclusion_ok = true;
    rep.dissipation_ok = true;

    double rate_sum_h1 = 0.0;   // (1/tau) sum (|du|_H^2 + delta_* |grad du|^2)
    double rate_sum_h2 = 0.0;   // (1/tau) sum |du|_{H2,h}^2
    double max_h2_sq = 0.0;

    for (int i = 0; i <= n; ++i) {
        const LedgerRow& lr = result.ledger[i];
        EstimateStepRow row;
        row.i = i;
        row.x = lr.x;
        row.y = lr.y;
        const double nv = norm_v(result.states[i]);
        row.v_sq = nv * nv;
        const double nh2 = norm_h2(result.states[i]);
        row.h2_sq = nh2 * nh2;
        max_h2_sq = std::max(max_h2_sq, row.h2_sq);
        row.diss_lhs = lr.diss_lhs;
        row.diss_rhs = lr.diss_rhs;
        row.lem41a_margin = lem41a_bound - row.v_sq;

        if (i >= 1) {
            const double fp2 = lr.f_norm * lr.f_norm;
            const double premise_rhs = tau * (lr.x + fp2);
            const double dx = lr.x - result.ledger[i - 1].x;
            row.gronwall_margin = premise_rhs - dx;
            const double fp_slack = 1e-9 * (1.0 + lr.x);
            if (dx > premise_rhs + fp_slack) rep.gronwall_premise_ok = false;
            if (lr.x > gronwall_bound * (1.0 + 1e-9)) rep.gronwall_conclusion_ok = false;
            if (row.v_sq > lem41a_bound * (1.0 + 1e-9)) rep.lem41a_ok = false;
            if (lr.diss_lhs > lr.diss_rhs + dissipation_slack) rep.dissipation_ok = false;

            const ScalarField diff = result.states[i] - result.states[i - 1];
            const double dh = norm_h(diff);
            const double dg = norm_h(gradient(diff));
            rate_sum_h1 += (dh * dh + c.delta_star * dg * dg) / tau;
            const double dh2 = norm_h2(diff);
            rate_sum_h2 += dh2 * dh2 / tau;
        }
        rep.per_step.push_back(row);
    }

    const double lem41b_bound = c.c4 * (u0_v_sq + f_sq + eps * eps + 1.0);
    rep.lem41b_margin = lem41b_bound - rate_sum_h1;
    rep.lem41b_ok = rate_sum_h1 <= lem41b_bound * (1.0 + 1e-9);

    const double data_h2 = u0_h2_sq + f_sq + eps * eps + 1.0;
    rep.lem42_margin = c.c5 * data_h2 - max_h2_sq;
    rep.lem43_margin =
        c.c6 / std::min(eps * eps, 1.0) * data_h2 - rate_sum_h2;
    return rep;
}

void EstimateReport::to_csv(std::ostream& os) const {
    os << "i,X,Y,V_sq,H2_sq,diss_lhs,diss_rhs,lem41a_margin,gronwall_margin\n";
    for (const auto& r : per_step)
        os << r.i << "," << r.x << "," << r.y << "," << r.v_sq << "," << r.h2_sq << ","
           << r.diss_lhs << "," << r.diss_rhs << "," << r.lem41a_margin << ","
           << r.gronwall_margin << "\n";
    os << "# C0=" << constants.c0 << " C3=" << constants.c3 << " C4=" << constants.c4
       << " C5=" << constants.c5 << " C6=" << constants.c6
       << " C1_tilde=" << constants.c1_tilde << " C2_tilde=" << constants.c2_tilde
       << " Cstar_tilde=" << constants.cstar_tilde
       << " delta_star=" << constants.delta_star << " delta1=" << constants.delta1
       << " tau_star=" << constants.tau_star << " C_r=" << constants.c_r << "\n"
       << "# lem41a_ok=" << lem41a_ok << " lem41b_ok=" << lem41b_ok
       << " gronwall_premise_ok=" << gronwall_premise_ok
       << " gronwall_conclusion_ok=" << gronwall_conclusion_ok
       << " dissipation_ok=" << dissipation_ok
       << " lem41b_margin=" << lem41b_margin << " lem42_margin=" << lem42_margin
       << " lem43_margin=" << lem43_margin
       << " tau_exceeds_tau_star=" << tau_exceeds_tau_star << "\n";
}

StabilityGap stability_gap(const FlowResult& a, const FlowResult& b,
                           const FlowProblem& prob_a, const FlowProblem& prob_b) {
    if (prob_a.grid != prob_b.grid)
        throw std::invalid_argument("stability_gap: mismatched grids");
    if (a.states.size() != b.states.size() || a.tau != b.tau)
        throw std::invalid_argument("stability_gap: mismatched trajectories");

    const int n = static_cast<int>(a.states.size()) - 1;
    const auto fa = sample_forcing(prob_a.f, prob_a.grid, prob_a.tau, prob_a.T);
    const auto fb = sample_forcing(prob_b.f, prob_b.grid, prob_b.tau, prob_b.T);
    double df_sq = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double d = norm_h(fa[i] - fb[i]);
        df_sq += a.tau * d * d;
    }

    auto node_value = [&](int i) {
        const ScalarField d = a.states[i] - b.states[i];
        const double dh = norm_h(d);
        const double dg = weighted_norm(prob_a.beta, gradient(d));
        return dh * dh + dg * dg;
    };

    StabilityGap out;
    out.ok = true;
    const double rhs0 = node_value(0) + df_sq;
    for (int i = 0; i <= n; ++i) {
        const double lhs = node_value(i);
        const double rhs = std::exp(a.t_end) * rhs0;
        out.lhs.push_back(lhs);
        out.rhs.push_back(rhs);
        if (lhs > rhs * (1.0 + 1e-6) + 1e-14) out.ok = false;
    }
    return out;
}

MoscoProbe mosco_probe(const ScalarField& alpha, const std::vector<VectorField>& w_seq,
                       const VectorField& w_limit, std::span<const double> eps_seq) {
    if (w_seq.empty() || w_seq.size() != eps_seq.size())
        throw std::invalid_argument("mosco_probe: sequence size mismatch");
    const double phi0_limit = phi(Epsilon(0.0), alpha, w_limit);
    const double alpha_l1 = l1_norm(alpha);

    // liminf proxy: smallest value over the tail half of the sequence
    const std::size_t n = w_seq.size();
    const std::size_t tail = n - std::max<std::size_t>(1, n / 2);
    double liminf = std::numeric_limits<double>::infinity();
    for (std::size_t k = tail; k < n; ++k)
        liminf = std::min(liminf, phi(Epsilon(eps_seq[k]), alpha, w_seq[k]));

    MoscoProbe out;
    out.m1_margin = liminf - phi0_limit;
    out.m2_worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double gap = phi(Epsilon(eps_seq[k]), alpha, w_limit) - phi0_limit;
        out.m2_worst_gap =
            std::max(out.m2_worst_gap, std::max(gap - eps_seq[k] * alpha_l1, -gap));
    }
    return out;
}

ConvergenceStudy convergence_study(const std::string& axis, const FlowProblem& prob,
                                   std::span<const double> levels,
                                   const SolverConfig& cfg) {
    if (levels.size() < 3)
        throw std::invalid_argument("convergence_study: need >= 3 levels");
    if (axis != "tau" && axis != "eps")
        throw std::invalid_argument("convergence_study: axis must be tau or eps");

    std::vector<FlowResult> runs;
    for (double lv : levels) {
        FlowProblem p = prob;
        if (axis == "tau")
            p.tau = lv;
        else
            p.eps = Epsilon(lv);
        runs.push_back(run_flow(p, cfg));
    }

    ConvergenceStudy study;
    study.axis = axis;
    study.levels.assign(levels.begin(), levels.end());
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
        const Interpolants ia(runs[k], runs[k].tau);
        const Interpolants ib(runs[k + 1], runs[k + 1].tau);
        const double t_max = std::min(ia.t_end(), ib.t_end());
        const double dt = std::min(runs[k].tau, runs[k + 1].tau);
        double gap = 0.0;
        for (double t = 0.0; t <= t_max + 1e-12; t += dt)
            gap = std::max(gap, norm_v(ia.linear(std::min(t, t_max)) -
                                       ib.linear(std::min(t, t_max))));
        study.gaps.push_back(gap);
    }
    for (std::size_t k = 0; k + 1 < study.gaps.size(); ++k) {
        const double lr = std::log(study.levels[k] / study.levels[k + 1]);
        study.rates.push_back(
            std::log(study.gaps[k] / study.gaps[k + 1]) / (lr != 0.0 ? lr : 1.0));
    }
    return study;
}

void ConvergenceStudy::to_csv(std::ostream& os) const {
    os << "axis,level,gap_to_next,rate\n";
    for (std::size_t k = 0; k < levels.size(); ++k) {
        os << axis << "," << levels[k] << ",";
        if (k < gaps.size()) os << gaps[k];
        os << ",";
        if (k < rates.size()) os << rates[k];
        os << "\n";
    }
}

}  // namespace tvflow

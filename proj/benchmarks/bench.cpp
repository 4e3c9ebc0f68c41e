#include <benchmark/benchmark.h>

#include <random>

#include "tvflow/elliptic.hpp"
#include "tvflow/flow.hpp"

using namespace tvflow;

namespace {

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ScalarField u(g);
    for (auto& x : u.v) x = dist(rng);
    return u;
}

void BM_gradient_divergence(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = Grid::rect(n, n, 1.0, 1.0);
    std::mt19937_64 rng(1);
    const ScalarField u = random_field(g, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(divergence(gradient(u)));
    }
    state.SetItemsProcessed(state.iterations() * g.cells());
}

void BM_solve_e(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = Grid::rect(n, n, 1.0, 1.0);
    std::mt19937_64 rng(2);
    const ScalarField f = random_field(g, rng);
    const CoefficientSet coeffs(ScalarField(g, 1.0), ScalarField(g, 1.0),
                                ScalarField(g, 1.0), f);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_e(Epsilon(0.1), coeffs, SolverConfig{}));
    }
}

void BM_flow_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid g = Grid::rect(n, n, 1.0, 1.0);
    std::mt19937_64 rng(3);
    FlowProblem p;
    p.grid = g;
    p.u0 = random_field(g, rng);
    p.alpha = ScalarField(g, 1.0);
    p.beta = ScalarField(g, 1.0);
    p.f = Forcing::zero();
    p.T = 1.0;
    p.tau = 0.05;
    p.eps = Epsilon(0.1);
    const ScalarField f_i(g, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(step_ap(p.u0, f_i, p, SolverConfig{}));
    }
}

}  // namespace

BENCHMARK(BM_gradient_divergence)->Arg(32)->Arg(128);
BENCHMARK(BM_solve_e)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_flow_step)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

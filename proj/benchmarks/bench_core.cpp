#include <benchmark/benchmark.h>

#include <vector>

#include "fdc/audit.hpp"
#include "fdc/calculus.hpp"
#include "fdc/hum.hpp"
#include "fdc/identities.hpp"
#include "fdc/rng.hpp"

using namespace fdc;

namespace {

CalibrationConfig desk_weights() {
    CalibrationConfig cfg;
    cfg.eps0 = 0.5;
    cfg.tau2 = 0.2;
    cfg.delta1 = 0.45;
    return cfg;
}

ControlProblem bench_problem(int N, int M) {
    ControlProblem p;
    p.mesh = SpaceMesh::uniform(1.0, N);
    p.grid = TimeGrid::uniform(0.5, M);
    p.omega = Interval{0.3, 0.8};
    p.a = PotentialField::zero(p.mesh, p.grid);
    p.weights = desk_weights();
    SpaceField g(p.mesh, SpacePlacement::PrimalInterior);
    const auto s1 = laplacian_eigenvector(p.mesh, 1);
    for (int i = 0; i < g.size(); ++i) g[i] = s1[i];
    p.g = g;
    return p;
}

void BM_ThomasSolve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto mesh = SpaceMesh::uniform(1.0, N);
    Rng rng(1);
    std::vector<double> a(static_cast<std::size_t>(N)), rhs(static_cast<std::size_t>(N));
    for (auto& x : a) x = rng.uniform(-1.0, 1.0);
    for (auto& x : rhs) x = rng.normal();
    const auto tri = implicit_heat_matrix(mesh.h, 1e-3, a);
    for (auto _ : state) benchmark::DoNotOptimize(tri.solve(rhs));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThomasSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_ForwardSolve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto mesh = SpaceMesh::uniform(1.0, N);
    const auto grid = TimeGrid::uniform(0.5, 64);
    const auto a = PotentialField::zero(mesh, grid);
    const auto g = laplacian_eigenvector(mesh, 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_forward(g, a));
}
BENCHMARK(BM_ForwardSolve)->Arg(63)->Arg(255)->Arg(1023);

void BM_AdjointSolve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto mesh = SpaceMesh::uniform(1.0, N);
    const auto grid = TimeGrid::uniform(0.5, 64);
    const auto a = PotentialField::zero(mesh, grid);
    const auto q_T = laplacian_eigenvector(mesh, 2);
    for (auto _ : state) benchmark::DoNotOptimize(solve_adjoint(q_T, a));
}
BENCHMARK(BM_AdjointSolve)->Arg(63)->Arg(255)->Arg(1023);

void BM_GramianApply(benchmark::State& state) {
    const auto p = bench_problem(static_cast<int>(state.range(0)), 32);
    Rng rng(3);
    std::vector<double> q(static_cast<std::size_t>(p.mesh.interior));
    for (auto& x : q) x = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(gramian_apply(p, q));
}
BENCHMARK(BM_GramianApply)->Arg(39)->Arg(159);

void BM_SolveHum(benchmark::State& state) {
    const auto p = bench_problem(static_cast<int>(state.range(0)), 16);
    for (auto _ : state) benchmark::DoNotOptimize(solve_hum(p));
}
BENCHMARK(BM_SolveHum)->Arg(39)->Arg(79);

void BM_IdentitySuite(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(run_identity_suite({8}, {9}, 5, 42));
}
BENCHMARK(BM_IdentitySuite);

void BM_CarlemanSides(benchmark::State& state) {
    const auto mesh = SpaceMesh::uniform(1.0, 40);
    const auto grid = TimeGrid::uniform(0.5, 40);
    const Interval omega{0.3, 0.8};
    const auto ledger = calibrate(grid.horizon, mesh.h, grid.dt, 0.0, desk_weights());
    const auto weights = make_weight_system(mesh, grid, omega, ledger);
    const auto a = PotentialField::zero(mesh, grid);
    Rng rng(5);
    SpaceField q_T(mesh, SpacePlacement::PrimalInterior);
    for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
    const auto q = solve_adjoint(q_T, a);
    for (auto _ : state)
        benchmark::DoNotOptimize(carleman_sides(q, weights, ledger, omega, AuditMode::Backward));
}
BENCHMARK(BM_CarlemanSides);

} // namespace

BENCHMARK_MAIN();

// Parallel kernels against their serial reference versions.
//
//   ./ipbm_bench --benchmark_filter=Assemble
//
// OMP_NUM_THREADS controls the parallel side.

#include "ipbm/experiment.hpp"
#include "ipbm/reference.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ipbm;

const Domain& sphere()
{
    static const Domain d = Domain::unit_sphere();
    return d;
}

SolverConfig tp_config(int m, int d)
{
    SolverConfig c;
    c.m = m;
    c.degrees = {d, d, d};
    c.nb = 200;
    return c;
}

void BM_Fps(benchmark::State& state)
{
    const auto cloud = fibonacci_sphere(Sphere{}, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(farthest_point_downsample_from(cloud, 200, 0));
}
BENCHMARK(BM_Fps)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_FpsReference(benchmark::State& state)
{
    const auto cloud = fibonacci_sphere(Sphere{}, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::farthest_point_downsample_from(cloud, 200, 0));
}
BENCHMARK(BM_FpsReference)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_InsideFlags(benchmark::State& state)
{
    const auto mesh = make_torus_mesh(Point3(0.5, 0.5, 0.5), 0.3, 0.12, 64, 32);
    const auto grid = grid_points(Box::unit(), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mesh_inside_flags(mesh, grid.points));
}
BENCHMARK(BM_InsideFlags)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_InsideFlagsReference(benchmark::State& state)
{
    const auto mesh = make_torus_mesh(Point3(0.5, 0.5, 0.5), 0.3, 0.12, 64, 32);
    const auto grid = grid_points(Box::unit(), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::mesh_inside_flags(mesh, grid.points));
}
BENCHMARK(BM_InsideFlagsReference)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_AssembleIpbf(benchmark::State& state)
{
    const auto cfg = tp_config(static_cast<int>(state.range(0)), 3);
    const auto space = build_space(sphere().bbox, cfg);
    const auto bvp = make_preset("sin5", "laplace");
    const auto B = boundary_points(sphere(), 200, 1);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_ipbf(space, bvp, B, cfg));
}
BENCHMARK(BM_AssembleIpbf)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_AssembleIpbfReference(benchmark::State& state)
{
    const auto cfg = tp_config(static_cast<int>(state.range(0)), 3);
    const auto space = build_space(sphere().bbox, cfg);
    const auto bvp = make_preset("sin5", "laplace");
    const auto B = boundary_points(sphere(), 200, 1);
    for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_ipbf(space, bvp, B, cfg));
}
BENCHMARK(BM_AssembleIpbfReference)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_AssembleIpbfType5(benchmark::State& state)
{
    SolverConfig cfg;
    cfg.space = SpaceKind::type5;
    cfg.m = static_cast<int>(state.range(0));
    cfg.degrees = {3, 3, 3};
    cfg.nb = 200;
    const auto space = build_space(sphere().bbox, cfg);
    const auto bvp = make_preset("sin5", "laplace");
    const auto B = boundary_points(sphere(), 200, 1);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_ipbf(space, bvp, B, cfg));
}
BENCHMARK(BM_AssembleIpbfType5)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_AssembleIpbfType5Reference(benchmark::State& state)
{
    SolverConfig cfg;
    cfg.space = SpaceKind::type5;
    cfg.m = static_cast<int>(state.range(0));
    cfg.degrees = {3, 3, 3};
    cfg.nb = 200;
    const auto space = build_space(sphere().bbox, cfg);
    const auto bvp = make_preset("sin5", "laplace");
    const auto B = boundary_points(sphere(), 200, 1);
    for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_ipbf(space, bvp, B, cfg));
}
BENCHMARK(BM_AssembleIpbfType5Reference)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_EvaluateErrors(benchmark::State& state)
{
    const auto cfg = tp_config(6, 4);
    const auto space = build_space(sphere().bbox, cfg);
    const Eigen::VectorXd c = Eigen::VectorXd::Ones(space_dimension(space));
    const auto pts = evaluation_points(sphere(), static_cast<int>(state.range(0)), 0, 1);
    const auto u = make_solution("sin5").value;
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_errors(space, c, u, pts));
}
BENCHMARK(BM_EvaluateErrors)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_EvaluateErrorsReference(benchmark::State& state)
{
    const auto cfg = tp_config(6, 4);
    const auto space = build_space(sphere().bbox, cfg);
    const Eigen::VectorXd c = Eigen::VectorXd::Ones(space_dimension(space));
    const auto pts = evaluation_points(sphere(), static_cast<int>(state.range(0)), 0, 1);
    const auto u = make_solution("sin5").value;
    for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_errors(space, c, u, pts));
}
BENCHMARK(BM_EvaluateErrorsReference)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

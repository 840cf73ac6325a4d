#include "fden/grid.hpp"
#include "fden/hydrogenic_density.hpp"
#include "fden/partial_waves.hpp"
#include "fden/radial_discretization.hpp"
#include "fden/test_function_spaces.hpp"
#include "fden/thomas_fermi.hpp"

#include <benchmark/benchmark.h>

using namespace fden;

namespace {

RadialGrid bound_grid(double gamma, std::size_t n)
{
    return build_grid(GridKind::loglinear, 1e-10, 360.0 / gamma, n, 20.0 / gamma);
}

void BM_BoundStates(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const Coupling cp = make_coupling(0.5);
    const RadialGrid grid = bound_grid(0.5, n);
    for (auto _ : state) benchmark::DoNotOptimize(bound_states(cp, channel_numbers(-1), grid, 6));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BoundStates)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_DenseDiracSpectrum(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const Coupling cp = make_coupling(0.5);
    const RadialGrid grid = build_grid(GridKind::loglinear, 1e-6, 120.0, n, 10.0);
    const ChannelOperator op = build_dirac_channel(cp, channel_numbers(1), grid);
    for (auto _ : state) benchmark::DoNotOptimize(eigensolve(op));
}
BENCHMARK(BM_DenseDiracSpectrum)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FurryRestriction(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const Coupling cp = make_coupling(0.5);
    const RadialGrid grid = build_grid(GridKind::loglinear, 1e-6, 120.0, n, 10.0);
    const EigenSystem eig = eigensolve(build_dirac_channel(cp, channel_numbers(-1), grid));
    const TestPotential u = make_builtin("rexp");
    for (auto _ : state) benchmark::DoNotOptimize(furry_restriction(eig, grid, u.eval, 0.1));
}
BENCHMARK(BM_FurryRestriction)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ChannelDensity(benchmark::State& state)
{
    const Coupling cp = make_coupling(0.5);
    const RadialGrid grid = density_grid_far(0.5, 2000);
    for (auto _ : state) benchmark::DoNotOptimize(channel_density(cp, channel_numbers(-1), 10, grid));
}
BENCHMARK(BM_ChannelDensity)->Unit(benchmark::kMillisecond);

void BM_NormKsDelta(benchmark::State& state)
{
    const TestPotential u = make_builtin("rexp");
    for (auto _ : state) benchmark::DoNotOptimize(norm_ksdelta(u, 0.75, 0.5));
}
BENCHMARK(BM_NormKsDelta)->Unit(benchmark::kMicrosecond);

void BM_SolveTF(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(solve_tf());
}
BENCHMARK(BM_SolveTF)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

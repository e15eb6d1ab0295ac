#include <benchmark/benchmark.h>

#include "ionrabi/dynamics.hpp"
#include "ionrabi/models.hpp"
#include "ionrabi/protocols.hpp"

using namespace ionrabi;

static void BM_F1Table(benchmark::State& state)
{
    const int n_max = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(NonlinearCoupling(0.4518, n_max).values().back());
    state.SetComplexityN(n_max);
}
BENCHMARK(BM_F1Table)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_F1Series(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(f1_series(n, 0.5));
}
BENCHMARK(BM_F1Series)->Arg(20)->Arg(200);

static void BM_BarrierEta(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(barrier_eta(17));
}
BENCHMARK(BM_BarrierEta)->Unit(benchmark::kMillisecond);

static void BM_LindbladRhs(benchmark::State& state)
{
    const HilbertSpace space(static_cast<int>(state.range(0)));
    const auto h = build_nonlinear_anti_jc(space, 1.0, 0.4518);
    LindbladSpec l;
    l.add(2.0, qubit_ops(space).sigma_minus);
    const Matrix rho = thermal_state(space, 0.3, Qubit::down).density_matrix();
    for (auto _ : state)
        benchmark::DoNotOptimize(lindblad_rhs(h, l, rho));
}
BENCHMARK(BM_LindbladRhs)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

static void BM_EvolveUnitary(benchmark::State& state)
{
    const HilbertSpace space(static_cast<int>(state.range(0)));
    const auto h = build_nonlinear_qrm(space, 4.0, 0.67898, 1.0, 0.0);
    const auto psi = fock_state(space, 0, Qubit::down);
    const auto times = linear_grid(20.0, 401);
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_unitary(h, psi, times).records.back().sigma_z);
}
BENCHMARK(BM_EvolveUnitary)->Arg(40)->Arg(84)->Unit(benchmark::kMillisecond);

static void BM_EvolveLindblad(benchmark::State& state)
{
    const HilbertSpace space(20);
    const auto h = build_nonlinear_anti_jc(space, 1.0, barrier_eta(8));
    LindbladSpec l;
    l.add(2.0, qubit_ops(space).sigma_minus);
    const auto rho = thermal_state(space, 0.3, Qubit::down);
    const auto times = linear_grid(2.0 * 3.141592653589793, 11);
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_lindblad(h, l, rho, times).records.back().n_mean);
}
BENCHMARK(BM_EvolveLindblad)->Unit(benchmark::kMillisecond);

static void BM_TwoToneGenerator(benchmark::State& state)
{
    const HilbertSpace space(30);
    const TwoToneHamiltonian h(two_tone_for(1.0, 0.5, 0.25, 0.0, 100.0), space);
    Vector psi = fock_state(space, 3, Qubit::down).vector();
    Vector out;
    double t = 0.0;
    for (auto _ : state) {
        h.apply_generator(t, psi, out);
        t += 1e-3;
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_TwoToneGenerator)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();

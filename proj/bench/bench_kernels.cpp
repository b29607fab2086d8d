// Serial references against the OpenMP kernels. Run with OMP_NUM_THREADS set
// to compare thread counts; the results themselves are identical either way.

#include <benchmark/benchmark.h>

#include "gema/hessian_core.hpp"
#include "gema/kvn.hpp"
#include "gema/random.hpp"

using namespace gema;

namespace {

hessian::MultiplicationTable table(std::size_t n) {
    Rng rng = make_stream(1, "bench.table");
    hessian::MultiplicationTable m(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) m(a, b, c) = uniform(rng, -1.0, 1.0);
    return m;
}

kvn::WaveFunction cube(std::size_t side) {
    Rng rng = make_stream(2, "bench.field");
    kvn::WaveFunction psi;
    psi.points.resize(static_cast<Eigen::Index>(side * side * side), 3);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j)
            for (std::size_t k = 0; k < side; ++k, ++r) {
                psi.points.row(r) << double(i), double(j), double(k);
                psi.values.emplace_back(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
            }
    psi.cell_volume = 1.0;
    return psi;
}

kvn::LGParams params() {
    kvn::LGParams p;
    p.charge = 0.5;
    return p;
}

void BM_wdvv_serial(benchmark::State& state) {
    const auto m = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hessian::serial::wdvv_residual(m));
}

void BM_wdvv_parallel(benchmark::State& state) {
    const auto m = table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hessian::wdvv_residual(m));
}

void BM_lg_energy_serial(benchmark::State& state) {
    const auto psi = cube(static_cast<std::size_t>(state.range(0)));
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(kvn::serial::lg_free_energy(psi, p));
}

void BM_lg_energy_parallel(benchmark::State& state) {
    const auto psi = cube(static_cast<std::size_t>(state.range(0)));
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(kvn::lg_free_energy(psi, p));
}

void BM_lg_residual_serial(benchmark::State& state) {
    const auto psi = cube(static_cast<std::size_t>(state.range(0)));
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(kvn::serial::lg_equation_residual(psi, p));
}

void BM_lg_residual_parallel(benchmark::State& state) {
    const auto psi = cube(static_cast<std::size_t>(state.range(0)));
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(kvn::lg_equation_residual(psi, p));
}

}  // namespace

BENCHMARK(BM_wdvv_serial)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(BM_wdvv_parallel)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(BM_lg_energy_serial)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_lg_energy_parallel)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_lg_residual_serial)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_lg_residual_parallel)->Arg(16)->Arg(32)->Arg(64);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "operstokes/immersion.hpp"
#include "operstokes/isomonodromy.hpp"
#include "operstokes/stokes.hpp"

using namespace operstokes;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

void BM_echelon(benchmark::State& st) {
    auto m = jmu_operator(monomial_oper(3, 1), static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(fraction_free_echelon(m, mode(st)).rank());
}
BENCHMARK(BM_echelon)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);

void BM_reference_rank(benchmark::State& st) {
    auto m = jmu_operator(monomial_oper(3, 1), static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::rank(m));
}
BENCHMARK(BM_reference_rank)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_solvability(benchmark::State& st) {
    auto op = monomial_oper(3, 1);
    for (auto _ : st) benchmark::DoNotOptimize(solvability(op, 20, -1, mode(st)).tangent_dim);
}
BENCHMARK(BM_solvability)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_monodromy(benchmark::State& st) {
    ComplexOper<double> op{3, 3, {{0.1, 0.2}, {0, 0}}};
    StokesSettings s;
    s.exec = mode(st);
    for (auto _ : st) benchmark::DoNotOptimize(monodromy_map(op, s).residuals.identity);
}
BENCHMARK(BM_monodromy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_jacobian_stencils(benchmark::State& st) {
    auto op = to_complex(monomial_oper(2, 2));
    JacobianSettings s;
    s.holomorphy = false;
    s.stokes.exec = mode(st);
    for (auto _ : st) benchmark::DoNotOptimize(jacobian<double>(op, s).rank);
}
BENCHMARK(BM_jacobian_stencils)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

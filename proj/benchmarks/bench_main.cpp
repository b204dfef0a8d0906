#include <benchmark/benchmark.h>

#include "loglattice/char_class.hpp"
#include "loglattice/lattice_tower.hpp"
#include "loglattice/log_derham.hpp"
#include "loglattice/rees.hpp"

using namespace loglattice;

namespace {

FormalConnection irregular(Exponent pole) {
    const std::size_t n = pole.size();
    return FormalConnection(n, {{ExponentialFactor::monomial(pole), RegularBlock::scalar(n, 0)}});
}

void BM_Tower(benchmark::State& s) {
    const auto c = irregular({3, 2});
    for (auto _ : s) benchmark::DoNotOptimize(tower(c, static_cast<int>(s.range(0))));
}
BENCHMARK(BM_Tower)->Arg(2)->Arg(4)->Arg(8);

void BM_LogDeRham(benchmark::State& s) {
    const auto c = irregular({2});
    const auto t = tower(c, 1);
    const auto w = WeightWindow::cube(1, -static_cast<int>(s.range(0)), static_cast<int>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(complex_cohomology(build_log_complex(t, TwistDivisor(), w).base));
}
BENCHMARK(BM_LogDeRham)->Arg(12)->Arg(24)->Arg(48);

void BM_CheckAlphaBidisc(benchmark::State& s) {
    const auto t = tower(irregular({1, 1}), 2);
    const auto w = WeightWindow::cube(2, -static_cast<int>(s.range(0)), static_cast<int>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(check_alpha(t, TwistDivisor::zero(2), w, 3));
}
BENCHMARK(BM_CheckAlphaBidisc)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ReesPipeline(benchmark::State& s) {
    const auto c = irregular({1});
    const auto b = tower_rees_builder(tower(c, 2), TwistDivisor::multiple(1, 1), 2);
    const auto w = WeightWindow::cube(1, -static_cast<int>(s.range(0)), static_cast<int>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(prop_b4_pipeline(b, w, 2));
}
BENCHMARK(BM_ReesPipeline)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_KClass(benchmark::State& s) {
    const CurveConnection c(BoundaryDivisor({P1Point::at(0), P1Point::at_infinity()}),
                            {RankOneForm{{{-static_cast<int>(s.range(0)) - 1, Rational(-1)}}}});
    for (auto _ : s) {
        const auto t = global_tower(c, 1);
        benchmark::DoNotOptimize(lhs_k_class(c, t));
    }
}
BENCHMARK(BM_KClass)->Arg(1)->Arg(3)->Arg(6);

void BM_OracleU(benchmark::State& s) {
    const CurveConnection c(BoundaryDivisor({P1Point::at(0), P1Point::at_infinity()}),
                            {RankOneForm{{{-3, Rational(-2)}, {0, Rational(1)}}}});
    const auto w = WeightWindow::cube(1, -static_cast<int>(s.range(0)), static_cast<int>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(de_rham_oracle_U(c, w));
}
BENCHMARK(BM_OracleU)->Arg(12)->Arg(48);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "orlicz/extension.hpp"
#include "orlicz/generator.hpp"
#include "orlicz/polynomial.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/solver.hpp"

using namespace orlicz;

namespace {

std::shared_ptr<const QuadDomain> grid(std::size_t cells) {
  return std::make_shared<const QuadDomain>(QuadDomain::interval(-1.0, 1.0, cells));
}

OrliczFunction kinked() { return OrliczFunction(PiecewiseLinearGenerator{{1.0}, {1.0, 2.0}}); }

}  // namespace

static void BM_Integrate(benchmark::State& state) {
  const auto d = grid(static_cast<std::size_t>(state.range(0)));
  std::vector<double> g(d->size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(d->point(i)[0]);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(*d, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Integrate)->Arg(4096)->Arg(65536);

static void BM_Objective(benchmark::State& state) {
  const auto d = grid(4096);
  const ApproxProblem prob(kinked(), sample(d, [](std::span<const double> t) { return std::sin(3 * t[0]); }), 2);
  const Polynomial P(PolynomialSpace{1, 2}, {0.0}, {0.1, 0.5, -0.2});
  for (auto _ : state) benchmark::DoNotOptimize(objective(prob, P));
}
BENCHMARK(BM_Objective);

static void BM_Solve(benchmark::State& state) {
  const auto d = grid(4096);
  const ApproxProblem prob(kinked(), sample(d, [](std::span<const double> t) { return t[0] * std::abs(t[0]) + std::exp(t[0]); }),
                           static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(prob).objective);
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_Extend(benchmark::State& state) {
  const auto d = grid(static_cast<std::size_t>(state.range(0)));
  const auto f = sample(d, [](std::span<const double> t) { return std::pow(std::abs(t[0]), -0.75); });
  const OrliczFunction F(PowerGenerator{2.0});
  for (auto _ : state) benchmark::DoNotOptimize(extend(F, f, 1).final_P.coeffs()[0]);
}
BENCHMARK(BM_Extend)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_NormEquivalence(benchmark::State& state) {
  const auto d = grid(2048);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_norm_equivalence(PolynomialSpace{1, 1}, *d, 2000, 1));
}
BENCHMARK(BM_NormEquivalence)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

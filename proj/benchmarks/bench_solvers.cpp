#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "mpsg/conservation_law.hpp"
#include "mpsg/constructions.hpp"
#include "mpsg/hamilton_jacobi.hpp"
#include "mpsg/hjb.hpp"
#include "mpsg/samples.hpp"

using namespace mpsg;

namespace {

GridFunction neg_quadratic(const Grid& g) {
  return GridFunction::sample(g, [](double x) { return -0.5 * x * x; });
}

void BM_HopfLax(benchmark::State& state) {
  const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
  const auto h = neg_quadratic(g);
  const auto lagrangian = Lagrangian::quadratic();
  for (auto _ : state) benchmark::DoNotOptimize(hopf_lax_evolve(lagrangian, h, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HopfLax)->RangeMultiplier(2)->Range(256, 2048)->Complexity();

void BM_GodunovStep(benchmark::State& state) {
  const Grid g(-2.0, 2.0, static_cast<std::size_t>(state.range(0)), true);
  const auto u = GridFunction::sample(g, [](double x) { return std::sin(std::numbers::pi * x); });
  const auto flux = FluxFunction::burgers();
  const double dt = 0.9 * g.dx();
  for (auto _ : state) benchmark::DoNotOptimize(godunov_step(flux, u, dt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GodunovStep)->RangeMultiplier(4)->Range(256, 4096);

void BM_LaxFriedrichsStep(benchmark::State& state) {
  const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
  const auto u = GridFunction::sample(g, [](double x) { return std::exp(-x * x); });
  const auto h = Hamiltonian::quadratic();
  const double dt = 0.45 * g.dx();
  for (auto _ : state) benchmark::DoNotOptimize(lax_friedrichs_step(h, u, dt, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LaxFriedrichsStep)->RangeMultiplier(4)->Range(256, 4096);

void BM_DynamicProgrammingStep(benchmark::State& state) {
  const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
  const auto phi = neg_quadratic(g);
  const auto problem = ControlProblem::integrator(g, phi, 2.0, {-1.0, 1.0}, 33, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(dp_step(problem, phi, g.dx()));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 33);
}
BENCHMARK(BM_DynamicProgrammingStep)->RangeMultiplier(4)->Range(256, 4096);

void BM_QuotientEquivalent(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SampleGenerator gen(3);
  auto vec = [&] {
    std::vector<double> v(n);
    for (auto& x : v) x = gen.dyadic(-4.0, 4.0, 4);
    return FiniteMaxVector::from_doubles(v);
  };
  std::vector<FiniteMaxVector> cols;
  for (std::size_t j = 0; j < n / 2; ++j) cols.push_back(vec());
  const FiniteSubspace d(std::move(cols));
  const auto f1 = vec(), f2 = vec();
  for (auto _ : state) benchmark::DoNotOptimize(quotient_equivalent(f1, f2, d));
}
BENCHMARK(BM_QuotientEquivalent)->RangeMultiplier(2)->Range(8, 64);

}  // namespace

BENCHMARK_MAIN();

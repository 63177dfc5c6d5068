#include <benchmark/benchmark.h>

#include <random>

#include "dnilab/checks.hpp"
#include "dnilab/engines.hpp"
#include "dnilab/ou_noise.hpp"
#include "dnilab/protocol.hpp"

namespace {

using namespace dnilab;
using namespace dnilab::models;

protocol::Scheme xyx() {
  return protocol::Scheme::make(0.6, 0.9, meas::kXAxis, meas::BlochDirection::make(1.0, 0.5),
                                meas::kXAxis);
}

void BM_MatrixExp(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto h = qmath::random_hermitian(n, rng);
  const qmath::ComplexMatrix m = qmath::Complex(0, -0.3) * h;
  for (auto _ : state) benchmark::DoNotOptimize(qmath::matrix_exp(m));
}
BENCHMARK(BM_MatrixExp)->RangeMultiplier(2)->Range(2, 64);

void BM_SpinBathP3(benchmark::State& state, SpinBathPath path) {
  SpinBathEngine engine({1.0, static_cast<std::size_t>(state.range(0))}, path);
  const auto scheme = xyx();
  for (auto _ : state) benchmark::DoNotOptimize(protocol::p3(engine, scheme));
}
BENCHMARK_CAPTURE(BM_SpinBathP3, structured, SpinBathPath::structured)->DenseRange(2, 8, 2);
BENCHMARK_CAPTURE(BM_SpinBathP3, dense, SpinBathPath::dense)->DenseRange(2, 6, 2);

void BM_DissipativeP3(benchmark::State& state, DissipativePath path) {
  DissipativeEngine engine({1.0, 0.5, static_cast<std::size_t>(state.range(0))}, path);
  const auto scheme = xyx();
  for (auto _ : state) benchmark::DoNotOptimize(protocol::p3(engine, scheme));
}
BENCHMARK_CAPTURE(BM_DissipativeP3, structured, DissipativePath::structured)->DenseRange(2, 10, 2);
BENCHMARK_CAPTURE(BM_DissipativeP3, dense, DissipativePath::dense)->DenseRange(2, 4, 1);

void BM_DissipativeJointPropagate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  DissipativeEngine engine({1.0, 0.5, n});
  std::mt19937_64 rng(2);
  const auto joint = qmath::random_density(std::size_t{1} << n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(engine.propagate(joint, 0.4));
}
BENCHMARK(BM_DissipativeJointPropagate)->DenseRange(2, 10, 2);

void BM_OuGaussianP3(benchmark::State& state) {
  OUGaussianEngine engine({1.0, 1.0});
  const auto scheme = xyx();
  for (auto _ : state) benchmark::DoNotOptimize(protocol::p3(engine, scheme));
}
BENCHMARK(BM_OuGaussianP3);

void BM_OuMonteCarloP3(benchmark::State& state) {
  OUMonteCarloEngine engine({1.0, 1.0}, static_cast<std::size_t>(state.range(0)), 3, 1);
  const auto scheme = xyx();
  for (auto _ : state) benchmark::DoNotOptimize(protocol::p3(engine, scheme));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OuMonteCarloP3)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);

void BM_SuperclassicalityCheck(benchmark::State& state) {
  SpinBathEngine engine({1.0, 4});
  const auto states = checks::default_test_states();
  for (auto _ : state) {
    benchmark::DoNotOptimize(checks::superclassicality_deviation(engine, states, 0.5, 0.7));
  }
}
BENCHMARK(BM_SuperclassicalityCheck);

}  // namespace

BENCHMARK_MAIN();

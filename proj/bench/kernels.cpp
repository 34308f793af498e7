// Serial reference kernels against the OpenMP versions. Thread count follows
// OMP_NUM_THREADS; the *_reference benchmarks are single threaded by design.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "lrloc/dynamics.hpp"
#include "lrloc/ensemble.hpp"
#include "lrloc/hamiltonian.hpp"
#include "lrloc/reference.hpp"
#include "lrloc/scaling.hpp"

namespace {

lrloc::LatticeSpec spec_for(int n) {
  lrloc::LatticeSpec s;
  s.n_per_dim = n;
  s.occupation = 0.5;
  s.disorder_width = 20;
  return s;
}

void BM_build(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const auto real = lrloc::sample_realization(spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lrloc::build(spec, real).entries.data());
  state.counters["sites"] = static_cast<double>(real.sites.size());
  state.counters["threads"] = omp_get_max_threads();
}

void BM_build_reference(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const auto real = lrloc::sample_realization(spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lrloc::reference::build(spec, real).entries.data());
  state.counters["sites"] = static_cast<double>(real.sites.size());
}

struct Decomposed {
  lrloc::SpectralDecomposition d;
  Eigen::Index start = 0;
  std::vector<double> grid = lrloc::log_time_grid(0.1, 1e17, 60);

  explicit Decomposed(int n) {
    const auto spec = spec_for(n);
    const auto real = lrloc::sample_realization(spec, 1);
    d = lrloc::decompose(lrloc::build(spec, real));
    start = static_cast<Eigen::Index>(real.row_of(real.center_index));
  }
};

void BM_propagate_densities(benchmark::State& state) {
  const Decomposed x(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lrloc::propagate_densities(x.d, x.start, x.grid).data());
  state.counters["threads"] = omp_get_max_threads();
}

void BM_propagate_densities_reference(benchmark::State& state) {
  const Decomposed x(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lrloc::reference::propagate_densities(x.d, x.start, x.grid).data());
}

void BM_decompose(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const auto h = lrloc::build(spec, lrloc::sample_realization(spec, 1));
  for (auto _ : state) benchmark::DoNotOptimize(lrloc::decompose(h).eigenvalues.data());
}

void BM_no_resonance_grouped(benchmark::State& state) {
  const lrloc::DistanceShells shells(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lrloc::log_no_resonance_probability(shells, 0.5, 1.0, 20.0));
}

void BM_no_resonance_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(lrloc::reference::log_no_resonance_probability(n, 0.5, 1.0, 20.0));
}

void BM_ensemble(benchmark::State& state) {
  lrloc::EnsembleJob job;
  job.spec = spec_for(7);
  job.n_realizations = 16;
  job.time_grid = lrloc::log_time_grid(0.1, 1e17, 60);
  job.observables.L_of_t = true;
  lrloc::RunOptions opts;
  opts.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lrloc::run_ensemble(job, opts).summary.mean_L.data());
}

}  // namespace

BENCHMARK(BM_build)->Arg(9)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_reference)->Arg(9)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decompose)->Arg(9)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_propagate_densities)->Arg(9)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_propagate_densities_reference)->Arg(9)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_no_resonance_grouped)->Arg(31)->Arg(101)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_no_resonance_reference)->Arg(31)->Arg(101)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ensemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Parallel kernels against their serial references on Fig. 2-sized generators.
// Argument: Fock dimension of the two resonant modes (auxiliary modes use 2).

#include <benchmark/benchmark.h>

#include <random>

#include "pseudomode/kernels.hpp"
#include "pseudomode/liouvillian.hpp"

using namespace pseudomode;

namespace {

PseudomodeSet bench_modes(int d0) {
  PseudomodeSet pm;
  pm.modes.push_back({-0.5, 0.025, Complex(0.27, -0.005), d0});
  pm.modes.push_back({0.5, 0.025, Complex(0.44, 0.003), d0});
  pm.modes.push_back({0.0, 6.5, Complex(0.0, 0.01), 2});
  pm.modes.push_back({0.0, 24.0, Complex(0.0, 0.003), 2});
  return pm;
}

CVector random_vector(std::size_t n) {
  std::mt19937 rng(7);
  std::normal_distribution<double> d;
  CVector v(n);
  for (auto& x : v) x = Complex(d(rng), d(rng));
  return v;
}

template <bool Parallel>
void lindblad(benchmark::State& state) {
  const auto model = make_generator_model(SystemSpec{0.5, 1.0}, bench_modes(static_cast<int>(state.range(0))));
  const std::size_t n = model.hilbert_dim();
  const CVector rho = random_vector(n * n);
  CVector out(n * n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::lindblad_apply(model.terms, rho.data(), out.data());
    else
      kernels::lindblad_apply_serial(model.terms, rho.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["liouville_dim"] = static_cast<double>(n * n);
}

template <bool Parallel>
void csr(benchmark::State& state) {
  const auto l = assemble_liouvillian(SystemSpec{0.5, 1.0}, bench_modes(static_cast<int>(state.range(0))));
  const CVector x = random_vector(l.size());
  CVector y(l.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      l.apply(x.data(), y.data());
    else
      l.apply_serial(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["liouville_dim"] = static_cast<double>(l.size());
}

}  // namespace

BENCHMARK(lindblad<true>)->Name("lindblad_apply")->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(lindblad<false>)->Name("lindblad_apply_serial")->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(csr<true>)->Name("csr_matvec")->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(csr<false>)->Name("csr_matvec_serial")->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

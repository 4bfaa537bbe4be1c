// Serial vs OpenMP kernels on the workloads the library actually runs:
// Bellman sweeps over workshop MDPs of growing context count, and the DQN
// minibatch gradient at the default network shape.
//
//   ./build/bench/bench_kernels --benchmark_filter=Bellman

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cpssperso/dqn.hpp"
#include "cpssperso/kernels.hpp"
#include "cpssperso/workshop_env.hpp"

namespace {

using namespace cpssperso;

// Workshop MDP with `extra` additional influencing machines (|S| = 72 * 2^extra).
FiniteMdp workshop_mdp(int extra) {
  env::EnvParams p;
  for (int i = 0; i < extra; ++i) p.contexts.push_back({"m" + std::to_string(i), true});
  return env::to_finite_mdp(p);
}

template <double (*Sweep)(const FiniteMdp&, std::span<const double>, std::span<double>,
                          std::span<double>, double)>
void BM_BellmanSweep(benchmark::State& state) {
  const auto mdp = workshop_mdp(static_cast<int>(state.range(0)));
  const std::size_t n = mdp.num_states() * mdp.num_actions();
  std::vector<double> in(n, 0.0), out(n), values(mdp.num_states());
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (double& v : in) v = u(gen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Sweep(mdp, in, out, values, 0.95));
    benchmark::ClobberMemory();
  }
  state.counters["states"] = static_cast<double>(mdp.num_states());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <double (*Grad)(kernels::MlpView, std::span<const double>,
                         std::span<const std::size_t>, std::span<const double>,
                         std::span<double>)>
void BM_MseGrad(benchmark::State& state) {
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  const std::vector<std::size_t> sizes{15, 32, 32, 5};
  const auto params = dqn::MlpParams::glorot(sizes, 7);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> act(0, 4);
  std::vector<double> inputs(batch * sizes.front()), targets(batch);
  std::vector<std::size_t> actions(batch);
  for (double& v : inputs) v = u(gen);
  for (double& v : targets) v = 2.0 * u(gen);
  for (auto& a : actions) a = act(gen);
  std::vector<double> grad(params.num_params());
  const kernels::MlpView view{sizes, params.data()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Grad(view, inputs, actions, targets, grad));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch));
}

}  // namespace

BENCHMARK(BM_BellmanSweep<kernels::bellman_sweep_serial>)
    ->Name("BellmanSweep/serial")
    ->DenseRange(0, 4);
BENCHMARK(BM_BellmanSweep<kernels::bellman_sweep_omp>)
    ->Name("BellmanSweep/omp")
    ->DenseRange(0, 4);
BENCHMARK(BM_MseGrad<kernels::mse_grad_serial>)->Name("MseGrad/serial")->Arg(32)->Arg(256);
BENCHMARK(BM_MseGrad<kernels::mse_grad_omp>)->Name("MseGrad/omp")->Arg(32)->Arg(256);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "sparsense/adaptive.hpp"
#include "sparsense/baselines.hpp"
#include "sparsense/model.hpp"

namespace {

using namespace sparsense;

struct Instance {
  SparseSignal truth;
  SensingEnsemble ensemble;
};

Instance make_instance(Eigen::Index n, Eigen::Index m, Eigen::Index k, double snr_db) {
  RandomStream rng(4242);
  Instance instance;
  instance.truth = generate_sparse_signal(n, k, rng);
  const Eigen::MatrixXd sensing = generate_sensing_matrix(m, n, rng);
  instance.ensemble = synthesize_measurements(sensing, instance.truth, snr_db, rng);
  return instance;
}

void BM_RzaNlmfStep(benchmark::State& state) {
  const Instance instance = make_instance(state.range(0), state.range(0) / 2, 2, 10.0);
  RzaNlmfConfig config;
  EstimatorState estimator;
  estimator.estimate = Eigen::VectorXd::Zero(instance.ensemble.dimension());
  const Eigen::VectorXd row = instance.ensemble.sensing_matrix.row(0);
  const double observation = instance.ensemble.observations[0];
  for (auto _ : state) {
    estimator = rza_nlmf_step(estimator, row, observation, config);
    benchmark::DoNotOptimize(estimator.estimate.data());
  }
}
BENCHMARK(BM_RzaNlmfStep)->Arg(40)->Arg(160)->Arg(640);

void BM_RunAss(benchmark::State& state) {
  const Instance instance = make_instance(40, 20, 2, 10.0);
  RzaNlmfConfig config;
  config.n_max = static_cast<std::size_t>(state.range(0));
  config.zeta = 1e-300;
  for (auto _ : state) {
    auto [result, trace] = run_ass(instance.ensemble, config, &instance.truth);
    benchmark::DoNotOptimize(result.estimate.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunAss)->Arg(800)->Arg(20000);

void BM_Omp(benchmark::State& state) {
  const Instance instance = make_instance(40, 20, state.range(0), 10.0);
  for (auto _ : state) {
    auto result = omp(instance.ensemble.sensing_matrix, instance.ensemble.observations,
                      static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(result.estimate.data());
  }
}
BENCHMARK(BM_Omp)->Arg(2)->Arg(6)->Arg(10);

void BM_BpdnShrinkage(benchmark::State& state) {
  const Instance instance = make_instance(40, 20, 2, 10.0);
  BpdnConfig config;
  config.lambda = 0.86;  // universal threshold at 10 dB, N = 40
  config.max_iterations = static_cast<std::size_t>(state.range(0));
  config.tolerance = 1e-14;
  for (auto _ : state) {
    auto result = bpdn_shrinkage(instance.ensemble.sensing_matrix,
                                 instance.ensemble.observations, config);
    benchmark::DoNotOptimize(result.estimate.data());
  }
}
BENCHMARK(BM_BpdnShrinkage)->Arg(200)->Arg(2000);

void BM_OracleExhaustive(benchmark::State& state) {
  const Instance instance = make_instance(16, 8, 2, 10.0);
  for (auto _ : state) {
    auto result = oracle_exhaustive(instance.ensemble.sensing_matrix,
                                    instance.ensemble.observations, 2);
    benchmark::DoNotOptimize(result.estimate.data());
  }
}
BENCHMARK(BM_OracleExhaustive);

}  // namespace

BENCHMARK_MAIN();

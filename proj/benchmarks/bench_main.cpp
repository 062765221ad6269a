#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "maxcon/analysis.hpp"
#include "maxcon/engine.hpp"
#include "maxcon/graph.hpp"
#include "maxcon/mapping.hpp"
#include "maxcon/rng.hpp"

namespace {

using namespace maxcon;

const Graph& bench_graph() {
  static const Graph g = random_geometric_graph(75, 0.35, 1);
  return g;
}

Eigen::VectorXd bench_measurements(int n) {
  std::mt19937_64 eng(7);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform01(eng);
  return x;
}

void BM_SoftMax(benchmark::State& state) {
  const Eigen::VectorXd x = bench_measurements(75);
  for (auto _ : state) {
    benchmark::DoNotOptimize(soft_max(x, 30.0));
  }
}
BENCHMARK(BM_SoftMax);

void BM_SpectralDecompose(benchmark::State& state) {
  const Graph& g = bench_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_decompose(g));
  }
}
BENCHMARK(BM_SpectralDecompose);

void BM_NonlinearStep(benchmark::State& state) {
  const Graph& g = bench_graph();
  const Eigen::VectorXd x = bench_measurements(75);
  const auto f = TransmitFunction::tanh_family(5.6234, 0.015);
  const Eigen::VectorXd y = map_initial(x, 5.0).y;
  const Eigen::VectorXd noise = Eigen::VectorXd::Zero(75);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nonlinear_step_pernode(y, g, f, 0.02, noise));
  }
}
BENCHMARK(BM_NonlinearStep);

void BM_Run200(benchmark::State& state) {
  const Graph& g = bench_graph();
  const Eigen::VectorXd x = bench_measurements(75);
  ConsensusConfig config;
  config.beta = 5.0;
  config.step_constant = 4.0;
  config.sigma_n2 = 1.0;
  config.t_budget = 200;
  config.seed = 11;
  config.function = TransmitFunction::tanh_family(5.6234, 0.015);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(config, g, x, 200));
  }
}
BENCHMARK(BM_Run200);

void BM_CovarianceOracle(benchmark::State& state) {
  const Spectrum s = spectral_decompose(bench_graph());
  const double lambda2 = algebraic_connectivity(s);
  const double h_prime = 0.03;
  const double a = optimal_step(75, lambda2, h_prime);
  for (auto _ : state) {
    benchmark::DoNotOptimize(covariance_norm_oracle(s, a, 1.0, h_prime));
  }
}
BENCHMARK(BM_CovarianceOracle);

}  // namespace

BENCHMARK_MAIN();

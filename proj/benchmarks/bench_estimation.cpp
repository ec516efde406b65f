#include "bench_common.hpp"
#include "salpchain/scenario.hpp"
#include "salpchain/ukf.hpp"

#include <benchmark/benchmark.h>

namespace salpchain {
namespace {

GaussianBelief prior(const Scenario& s) {
  GaussianBelief b;
  b.mean = AugmentedState::from(s.chain, bench::bentState(s.linkCount())).flatten();
  b.covariance = 1e-4 * Eigen::MatrixXd::Identity(b.mean.size(), b.mean.size());
  return b;
}

void BM_UkfPredict(benchmark::State& state) {
  const Scenario s = defaultReferenceScenario();
  const UnscentedFilter f(s.chain, s.filterConfig());
  const GaussianBelief b = prior(s);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
  for (auto _ : state) benchmark::DoNotOptimize(f.predict(b, u, ForcePair::zero(3)));
}
BENCHMARK(BM_UkfPredict);

void BM_UkfUpdate(benchmark::State& state) {
  const Scenario s = defaultReferenceScenario();
  const UnscentedFilter f(s.chain, s.filterConfig());
  const GaussianBelief b = prior(s);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
  const Eigen::VectorXd z = f.measure(b.mean, u, ForcePair::zero(3));
  for (auto _ : state) benchmark::DoNotOptimize(f.update(b, z, u, ForcePair::zero(3)));
}
BENCHMARK(BM_UkfUpdate);

void BM_ReferenceScenarioRun(benchmark::State& state) {
  const Scenario s = defaultReferenceScenario();
  for (auto _ : state) benchmark::DoNotOptimize(runScenario(s));
}
BENCHMARK(BM_ReferenceScenarioRun)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace salpchain

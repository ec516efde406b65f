#include "bench_common.hpp"
#include "salpchain/imu_model.hpp"
#include "salpchain/observability.hpp"

#include <benchmark/benchmark.h>

namespace salpchain {
namespace {

void BM_DynamicsRhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainParams p = bench::chain(n);
  const CouplingMatrices c = buildCoupling(p);
  const ChainState s = bench::bentState(n);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  const ForcePair ext = ForcePair::zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(dynamicsRhs(p, c, s, u, ext));
}
BENCHMARK(BM_DynamicsRhs)->Arg(3)->Arg(10)->Arg(30);

void BM_BuildCoupling(benchmark::State& state) {
  const ChainParams p = bench::chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(buildCoupling(p));
}
BENCHMARK(BM_BuildCoupling)->Arg(3)->Arg(10)->Arg(30);

void BM_Rk4Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainParams p = bench::chain(n);
  const CouplingMatrices c = buildCoupling(p);
  const ChainState s = bench::bentState(n);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  const ExternalForceField ext = noExternalForce(n);
  for (auto _ : state) benchmark::DoNotOptimize(rk4Step(p, c, s, u, ext, 0.0, 1e-3));
}
BENCHMARK(BM_Rk4Step)->Arg(3)->Arg(10)->Arg(30);

void BM_MeasureAllTrue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainParams p = bench::chain(n);
  const CouplingMatrices c = buildCoupling(p);
  const ChainState s = bench::bentState(n);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  const std::vector<ImuMount> mounts = cmMounts(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(measureAllTrue(p, c, s, u, ForcePair::zero(n), mounts));
  }
}
BENCHMARK(BM_MeasureAllTrue)->Arg(3)->Arg(10);

void BM_CheckObservability(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainParams p = bench::chain(n);
  const ChainState s = bench::bentState(n);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        checkObservability(p, s, u, ForcePair::zero(n), defaultConditionTolerance(n)));
  }
}
BENCHMARK(BM_CheckObservability)->Arg(3)->Arg(6);

}  // namespace
}  // namespace salpchain

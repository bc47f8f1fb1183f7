#include "tinlinq/fixtures.hpp"
#include "tinlinq/matching.hpp"
#include "tinlinq/power.hpp"
#include "tinlinq/region.hpp"
#include "tinlinq/sim.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace tinlinq;

// Random strengths with a dominant diagonal so a moderate target is feasible.
ChannelMatrix random_alpha(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) = i == j ? 3.0 + u(rng) : 0.5 * u(rng);
  }
  return ChannelMatrix(a);
}

GdofTuple small_target(const ChannelMatrix& alpha) {
  GdofTuple d{Eigen::VectorXd(alpha.size())};
  for (int k = 0; k < alpha.size(); ++k) d.d(k) = 0.3 * alpha(k, k);
  return d;
}

void BM_MaxMatching(benchmark::State& state) {
  const ChannelMatrix alpha = random_alpha(static_cast<int>(state.range(0)), 11);
  const UserSet all = all_users(alpha.size());
  for (auto _ : state) benchmark::DoNotOptimize(max_matching_weight(alpha, all));
}
BENCHMARK(BM_MaxMatching)->RangeMultiplier(4)->Range(4, 256);

void BM_Hungarian(benchmark::State& state) {
  const ChannelMatrix alpha = random_alpha(static_cast<int>(state.range(0)), 12);
  const GdofTuple d = small_target(alpha);
  for (auto _ : state) benchmark::DoNotOptimize(solve_power_hungarian(alpha, d));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(4)->Range(4, 256);

void BM_Auction(benchmark::State& state) {
  const ChannelMatrix alpha = random_alpha(static_cast<int>(state.range(0)), 13);
  const GdofTuple d = small_target(alpha);
  AuctionOptions opts;
  opts.epsilon = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(solve_power_auction(alpha, d, opts));
}
BENCHMARK(BM_Auction)->RangeMultiplier(4)->Range(4, 64);

void BM_Region(benchmark::State& state) {
  const ChannelMatrix alpha = random_alpha(static_cast<int>(state.range(0)), 14);
  const UserSet all = all_users(alpha.size());
  for (auto _ : state) benchmark::DoNotOptimize(tina_polytope(alpha, all));
}
BENCHMARK(BM_Region)->DenseRange(4, 12, 4);

void BM_RegionFixA(benchmark::State& state) {
  const ChannelMatrix alpha = fixtures::fix_a();
  for (auto _ : state) benchmark::DoNotOptimize(tina_polytope(alpha, all_users(3)));
}
BENCHMARK(BM_RegionFixA);

void BM_Drop(benchmark::State& state) {
  const Scenario sc = scenario1(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_drop(sc, ++seed));
}
BENCHMARK(BM_Drop)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();

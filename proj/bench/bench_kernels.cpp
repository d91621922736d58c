// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "sensor_rank/classifier.hpp"
#include "sensor_rank/ranker.hpp"
#include "sensor_rank/resampling.hpp"
#include "support/generators.hpp"

namespace {

using namespace sensor_rank;

struct RankInput {
  std::vector<UserStats> users;
  TransitionMatrix P;
};

const RankInput& rank_input(std::size_t n) {
  static std::map<std::size_t, RankInput> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    Rng rng(17);
    RankInput in;
    in.users = gen::random_candidates(rng, n);
    const auto g = gen::random_graph(rng, in.users, 8.0 / static_cast<double>(n));
    in.P = build_transition(in.users, g);
    it = cache.emplace(n, std::move(in)).first;
  }
  return it->second;
}

void BM_TwitterRankSerial(benchmark::State& state) {
  const auto& in = rank_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(twitterrank_serial(in.P, in.users, {}));
}

void BM_TwitterRankParallel(benchmark::State& state) {
  const auto& in = rank_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(twitterrank(in.P, in.users, {}));
}

BENCHMARK(BM_TwitterRankSerial)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_TwitterRankParallel)->Arg(200)->Arg(2000)->Arg(20000);

std::vector<FeatureVector> knn_points(std::size_t n) {
  Rng rng(3);
  return gen::random_dataset(rng, n, 600, 10).vectors;
}

void BM_NearestNeighborsSerial(benchmark::State& state) {
  const auto pts = knn_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbors_serial(pts, 5));
}

void BM_NearestNeighborsParallel(benchmark::State& state) {
  const auto pts = knn_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nearest_neighbors(pts, 5));
}

BENCHMARK(BM_NearestNeighborsSerial)->Arg(500)->Arg(2000);
BENCHMARK(BM_NearestNeighborsParallel)->Arg(500)->Arg(2000);

LabeledDataset forest_data() {
  Rng rng(5);
  return gen::random_dataset(rng, 2000, 1500, 12);
}

void BM_RandomForestSerial(benchmark::State& state) {
  const auto data = forest_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_rf_serial(data, static_cast<int>(state.range(0)), 1));
  }
}

void BM_RandomForestParallel(benchmark::State& state) {
  const auto data = forest_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_rf(data, static_cast<int>(state.range(0)), 1));
  }
}

BENCHMARK(BM_RandomForestSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomForestParallel)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

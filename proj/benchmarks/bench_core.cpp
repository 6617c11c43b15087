#include <benchmark/benchmark.h>

#include <random>

#include "sitext/simharness.hpp"

using namespace sitext;

namespace {

FeatureMatrix random_features(int n, int d, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  FeatureMatrix fm;
  fm.rows.resize(n, d);
  for (Eigen::Index i = 0; i < fm.rows.size(); ++i) fm.rows.data()[i] = u(rng);
  for (int i = 0; i < n; ++i) fm.doc_ids.push_back("d" + std::to_string(i));
  return fm;
}

std::vector<std::string> alternating_labels(int n) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(i % 2 ? "a" : "b");
  return labels;
}

void BM_DistanceMatrix(benchmark::State& state) {
  const FeatureMatrix fm = random_features(static_cast<int>(state.range(0)), 300);
  const WeightVector w = WeightVector::uniform(300);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_distance_matrix(fm.rows, w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceMatrix)->Arg(250)->Arg(500)->Arg(1200)->Complexity();

void BM_CvAccuracy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FeatureMatrix fm = random_features(n, 300);
  const auto labels = alternating_labels(n);
  const WeightVector w = WeightVector::uniform(300);
  for (auto _ : state) benchmark::DoNotOptimize(cv_accuracy(fm, labels, w, {3, 5, 7}));
}
BENCHMARK(BM_CvAccuracy)->Arg(500)->Arg(1200);

void BM_ForwardProject(benchmark::State& state) {
  const FeatureMatrix fm = random_features(static_cast<int>(state.range(0)), 300);
  const WeightVector w = WeightVector::uniform(300);
  for (auto _ : state) benchmark::DoNotOptimize(forward_project(fm, w));
}
BENCHMARK(BM_ForwardProject)->Arg(200)->Arg(928)->Unit(benchmark::kMillisecond);

void BM_WarmStartProject(benchmark::State& state) {
  const FeatureMatrix fm = random_features(static_cast<int>(state.range(0)), 300);
  const WeightVector w = WeightVector::uniform(300);
  const Layout2D init = forward_project(fm, w).layout;
  for (auto _ : state) benchmark::DoNotOptimize(forward_project(fm, w, &init));
}
BENCHMARK(BM_WarmStartProject)->Arg(928)->Unit(benchmark::kMillisecond);

void BM_InvertWeights(benchmark::State& state) {
  const FeatureMatrix fm = random_features(200, 300);
  std::vector<Move> pins;
  for (int i = 0; i < state.range(0); ++i) {
    pins.push_back({fm.doc_ids[static_cast<std::size_t>(i)], i % 2 ? Eigen::Vector2d(0, 0) : Eigen::Vector2d(1, 1)});
  }
  const WeightVector w = WeightVector::uniform(300);
  for (auto _ : state) benchmark::DoNotOptimize(invert_weights(fm, pins, w));
}
BENCHMARK(BM_InvertWeights)->Arg(10)->Arg(100);

void BM_TfidfHashed(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<Document> docs;
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    for (int t = 0; t < 150; ++t) text += "word" + std::to_string(rng() % 20000) + " ";
    docs.push_back({"d" + std::to_string(i), text, std::nullopt, {}});
  }
  const Corpus corpus = tokenize_corpus(Corpus(std::move(docs)));
  for (auto _ : state) benchmark::DoNotOptimize(tfidf_hashed(corpus, 300));
}
BENCHMARK(BM_TfidfHashed)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

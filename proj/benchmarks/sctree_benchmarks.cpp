#include <benchmark/benchmark.h>

#include <random>

#include "sctree/correlation.hpp"
#include "sctree/exec.hpp"
#include "sctree/gateway.hpp"
#include "sctree/scoring.hpp"
#include "sctree/transform.hpp"
#include "sctree/tree.hpp"

using namespace sctree;

namespace {

std::string words(std::size_t n, std::uint64_t seed) {
  static const char* vocab[] = {"the", "river", "stone", "light", "morning", "quiet", "walked", "under",
                                "bridge", "city", "old", "green", "wind", "over", "a", "slowly"};
  std::mt19937_64 rng(seed);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += vocab[rng() % std::size(vocab)];
  }
  return s;
}

std::vector<OperationPair> pairs(std::size_t k) {
  std::vector<OperationPair> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({"f", "i", "op" + std::to_string(i)});
  return out;
}

void BM_Bleu(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ref = words(n, 1);
  const auto hyp = words(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(bleu(hyp, ref));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Bleu)->Arg(16)->Arg(128)->Arg(1024);

void BM_Levenshtein(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = words(n, 3);
  const auto b = words(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(levenshtein(a, b));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_Levenshtein)->Arg(16)->Arg(128)->Arg(512);

void BM_BuildTree(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const int depth = static_cast<int>(state.range(1));
  const MockTransformer t(MockChannel::drop_last_words(1));
  Node root;
  root.content = words(64, 5);
  const auto ps = pairs(k);
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(root, ps, depth, t));
}
BENCHMARK(BM_BuildTree)->Args({3, 3})->Args({3, 5})->Args({1, 12});

void BM_EnumeratePaths(benchmark::State& state) {
  const MockTransformer t(MockChannel::identity());
  Node root;
  root.content = "x";
  const Tree tree = build_tree(root, pairs(3), 5, t);
  const auto anchor = state.range(0) == 0 ? PathAnchor::root_only : PathAnchor::all_chains;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_paths(tree, 3, anchor));
}
BENCHMARK(BM_EnumeratePaths)->Arg(0)->Arg(1);

void BM_TreeProfile(benchmark::State& state) {
  const MockTransformer t(MockChannel::seeded_word_dropout(0.1, 3));
  Node root;
  root.content = words(80, 6);
  const Tree tree = build_tree(root, pairs(3), 3, t);
  const ExecHarness harness;
  const auto metric = SimilarityMetric::parse("bleu");
  for (auto _ : state) {
    Scorer scorer(harness, nullptr);
    benchmark::DoNotOptimize(scorer.tree_profile(tree, 3, PathAnchor::root_only, metric));
  }
}
BENCHMARK(BM_TreeProfile);

void BM_HashedEmbedding(benchmark::State& state) {
  HashedEmbedder e;
  const auto text = words(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(e.embed(text));
}
BENCHMARK(BM_HashedEmbedding)->Arg(64)->Arg(1024);

void BM_Pearson(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d;
  std::vector<double> xs(static_cast<std::size_t>(state.range(0))), ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = d(rng);
    ys[i] = xs[i] + d(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(pearson(xs, ys));
}
BENCHMARK(BM_Pearson)->Arg(6)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();

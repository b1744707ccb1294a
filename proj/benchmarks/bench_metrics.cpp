// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "msum/labeling.hpp"
#include "msum/metrics.hpp"
#include "msum/synth.hpp"

namespace {

std::vector<std::string> random_words(std::size_t n, std::size_t vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(rng() % vocab));
  return out;
}

void BM_RougeAll(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cand = random_words(n, 50, 1);
  const auto ref = random_words(n, 50, 2);
  for (auto _ : state) benchmark::DoNotOptimize(msum::rouge_all(cand, ref));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RougeAll)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Fragments(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto doc = random_words(n, 50, 3);
  const auto summary = random_words(n / 10 + 1, 50, 4);
  for (auto _ : state) benchmark::DoNotOptimize(msum::extractive_fragments(doc, summary));
}
BENCHMARK(BM_Fragments)->RangeMultiplier(4)->Range(64, 4096);

void BM_GreedyOracle(benchmark::State& state) {
  msum::SynthSpec spec = msum::resolve_synth_spec("demo");
  spec.min_sentences = static_cast<std::size_t>(state.range(0));
  spec.max_sentences = spec.min_sentences;
  for (auto& d : spec.domains) d.docs = 4;
  const auto corpus = msum::make_synthetic_corpus(spec, 1);
  const auto& doc = corpus.documents().front();
  for (auto _ : state) benchmark::DoNotOptimize(msum::greedy_oracle(doc));
}
BENCHMARK(BM_GreedyOracle)->Arg(8)->Arg(32)->Arg(64);

}  // namespace

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <benchmark/benchmark.h>

#include "msum/model.hpp"
#include "msum/strategies.hpp"
#include "msum/synth.hpp"
#include "msum/vocabulary.hpp"

namespace {

struct Fixture {
  msum::ModelConfig config;
  msum::ParameterStore params;
  std::vector<msum::EncodedDocument> docs;

  explicit Fixture(std::size_t sentences) {
    msum::SynthSpec spec = msum::resolve_synth_spec("demo");
    spec.min_sentences = spec.max_sentences = sentences;
    for (auto& d : spec.domains) d.docs = 20;
    const auto corpus = msum::make_synthetic_corpus(spec, 3);
    const auto vocab = msum::Vocabulary::build(corpus, 1);
    for (const auto& d : corpus.documents()) docs.push_back(msum::encode_document(d, vocab));
    for (auto& d : docs) d.labels.assign(d.sentences.size(), 0);
    config.embed_dim = 32;
    config.conv_filter_widths = {1, 2, 3};
    config.conv_filters_per_width = 16;
    config.model_dim = 32;
    config.attention_heads = 2;
    config.ffn_dim = 64;
    params = msum::init_params(config, vocab.size(), corpus.domains().size(), 1);
  }
};

void BM_ScoreDocument(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  const msum::ScoringInput input{&f.docs.front(), std::nullopt, {}};
  for (auto _ : state) benchmark::DoNotOptimize(msum::score_sentences(f.config, f.params, input));
}
BENCHMARK(BM_ScoreDocument)->Arg(8)->Arg(30)->Arg(50);

void BM_JointStep(benchmark::State& state) {
  Fixture f(8);
  std::vector<const msum::EncodedDocument*> batch;
  for (std::size_t i = 0; i < 16; ++i) batch.push_back(&f.docs[i]);
  auto grads = f.params.zeros_like();
  msum::ForwardOptions options;
  options.training = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(msum::joint_step<float>(f.config, f.params, batch, &grads, options));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch.size()));
}
BENCHMARK(BM_JointStep);

}  // namespace

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/classifier.hpp"

#include <random>

#include <fmt/format.h>

#include "msum/autograd.hpp"
#include "msum/error.hpp"
#include "msum/optimizer.hpp"
#include "msum/vocabulary.hpp"

namespace msum {
namespace {

struct Example {
  std::vector<std::int32_t> ids;
  std::size_t label = 0;
};

std::vector<Example> collect(const Corpus& corpus, const std::vector<int>& sources, Split split,
                             const Vocabulary& vocab, std::size_t max_tokens) {
  std::vector<Example> out;
  for (std::size_t c = 0; c < sources.size(); ++c) {
    for (const auto* doc : corpus.select(sources[c], split)) {
      Example ex;
      ex.label = c;
      for (const auto& s : doc->sentences) {
        for (const auto& tok : s.tokens) {
          if (ex.ids.size() == max_tokens) break;
          ex.ids.push_back(vocab.id(tok));
        }
      }
      if (!ex.ids.empty()) out.push_back(std::move(ex));
    }
  }
  return out;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(rng() % i)]);
}

}  // namespace

ClassifierReport domain_classifier(const Corpus& corpus, std::uint64_t seed, const ClassifierConfig& config) {
  const auto& sources = corpus.source_domains();
  if (sources.size() < 2) {
    throw Error(ErrorKind::input, "the domain classifier needs at least two source domains");
  }
  if (config.embed_dim < 1 || config.epochs < 1 || config.batch_size < 1 || !(config.learning_rate > 0.0)) {
    throw Error(ErrorKind::config, "invalid classifier config");
  }
  const Vocabulary vocab = Vocabulary::build(corpus, config.min_frequency);
  auto train_set = collect(corpus, sources, Split::train, vocab, config.max_tokens);
  const auto test_set = collect(corpus, sources, Split::test, vocab, config.max_tokens);
  if (train_set.empty() || test_set.empty()) {
    throw Error(ErrorKind::input, "the domain classifier needs train and test documents in the source domains");
  }

  std::mt19937_64 rng(seed);
  if (config.permute_labels) {
    std::vector<std::size_t> labels;
    for (const auto& ex : train_set) labels.push_back(ex.label);
    for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[static_cast<std::size_t>(rng() % i)]);
    for (std::size_t i = 0; i < labels.size(); ++i) train_set[i].label = labels[i];
  }

  const std::size_t C = sources.size();
  const auto d = static_cast<std::size_t>(config.embed_dim);
  ParameterStore params;
  params.set_seed(seed);
  {
    std::uniform_real_distribution<float> u(-0.1f, 0.1f);
    Tensor emb({vocab.size(), d});
    for (auto& v : emb.values()) v = u(rng);
    Tensor w({d, C});
    for (auto& v : w.values()) v = u(rng);
    params.add("embedding", std::move(emb));
    params.add("weight", std::move(w));
    params.add("bias", Tensor({1, C}));
  }
  GradientStore grads = params.zeros_like();
  OptimizerConfig opt_config;
  opt_config.kind = OptimizerKind::adam;
  Optimizer<float> optimizer(opt_config);

  auto logits_of = [&](Tape<float>& tape, const Example& ex, GradientStore* g) {
    const VarId emb = tape.parameter(params.at("embedding"), g ? &g->at("embedding") : nullptr);
    const VarId w = tape.parameter(params.at("weight"), g ? &g->at("weight") : nullptr);
    const VarId b = tape.parameter(params.at("bias"), g ? &g->at("bias") : nullptr);
    const VarId x = ag::mean_rows(tape, ag::gather_rows(tape, emb, std::span<const std::int32_t>(ex.ids)));
    return ag::linear(tape, x, w, b);
  };

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto bs = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t begin = 0; begin < order.size(); begin += bs) {
      const std::size_t end = std::min(order.size(), begin + bs);
      grads.zero();
      const float inv = 1.0f / static_cast<float>(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const auto& ex = train_set[order[i]];
        Tape<float> tape;
        const VarId loss = ag::softmax_xent(tape, logits_of(tape, ex, &grads), ex.label);
        tape.backward(loss, inv);
      }
      require_finite_gradients(grads);
      optimizer.apply(params, grads, config.learning_rate);
    }
  }

  std::size_t correct = 0;
  for (const auto& ex : test_set) {
    Tape<float> tape;
    const auto& z = tape.value(logits_of(tape, ex, nullptr));
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c) {
      if (z[c] > z[best]) best = c;
    }
    correct += best == ex.label ? 1 : 0;
  }

  ClassifierReport report;
  for (int id : sources) report.domains.push_back(corpus.domains().at(id).name);
  report.train_documents = train_set.size();
  report.test_documents = test_set.size();
  report.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());
  report.chance = 1.0 / static_cast<double>(C);
  report.permuted = config.permute_labels;
  return report;
}

}  // namespace msum

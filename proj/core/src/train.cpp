// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <fmt/format.h>

#include "msum/error.hpp"
#include "msum/eval.hpp"
#include "msum/run_config.hpp"

namespace msum {
namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Endless pass over one domain's training documents, reshuffled on wrap.
class DomainIterator {
 public:
  DomainIterator(std::vector<const EncodedDocument*> docs, std::uint64_t seed)
      : docs_(std::move(docs)), rng_(seed) {
    shuffle();
  }

  std::vector<const EncodedDocument*> next(std::size_t n) {
    n = std::min(n, docs_.size());
    std::vector<const EncodedDocument*> out;
    out.reserve(n);
    while (out.size() < n) {
      if (pos_ == docs_.size()) {
        shuffle();
        pos_ = 0;
      }
      out.push_back(docs_[pos_++]);
    }
    return out;
  }

  std::size_t size() const { return docs_.size(); }

 private:
  void shuffle() {
    for (std::size_t i = docs_.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng_() % i);
      std::swap(docs_[i - 1], docs_[j]);
    }
  }

  std::vector<const EncodedDocument*> docs_;
  std::mt19937_64 rng_;
  std::size_t pos_ = 0;
};

struct SourceDomain {
  int id = 0;
  std::string name;
  std::vector<EncodedDocument> train;
  std::vector<EncodedDocument> valid;
  std::vector<const Document*> valid_raw;
};

}  // namespace

TrainResult train(const Corpus& corpus, const TrainConfig& config, const TrainOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (!corpus.source_labeled()) {
    throw Error(ErrorKind::input,
                "corpus has no extractive labels for its source domains; run the `label` command first");
  }
  if (corpus.source_domains().empty()) throw Error(ErrorKind::config, "corpus has no source domains");

  std::size_t feature_dim = 0;
  if (config.uses_features()) {
    if (options.features == nullptr || options.features->empty()) {
      throw Error(ErrorKind::usage, "the pretrained strategy needs an external feature file");
    }
    feature_dim = options.features->dim();
  }
  const ModelConfig model_config = config.resolved_model(feature_dim);
  model_config.validate();

  const Vocabulary vocab = Vocabulary::build(corpus, config.vocab_min_frequency, config.vocab_max_size);

  std::vector<int> source_ids = corpus.source_domains();
  std::sort(source_ids.begin(), source_ids.end());
  std::vector<SourceDomain> sources;
  for (int id : source_ids) {
    SourceDomain s;
    s.id = id;
    s.name = corpus.domains().at(id).name;
    for (const auto* doc : corpus.select(id, Split::train)) s.train.push_back(encode_document(*doc, vocab, config.limits));
    if (s.train.empty()) {
      throw Error(ErrorKind::input, fmt::format("source domain '{}' has no training documents", s.name));
    }
    for (const auto* doc : corpus.select(id, Split::valid)) {
      if (config.max_valid_docs != 0 && s.valid_raw.size() >= config.max_valid_docs) break;
      s.valid_raw.push_back(doc);
      s.valid.push_back(encode_document(*doc, vocab, config.limits));
    }
    sources.push_back(std::move(s));
  }
  const bool meta = config.strategy == Strategy::meta;
  if (meta && config.gamma != 1.0 && sources.size() < 2) {
    throw Error(ErrorKind::config, "the meta strategy needs at least two source domains unless gamma = 1");
  }

  ParameterStore params = init_params(model_config, vocab.size(), corpus.domains().size(), config.seed);
  Optimizer<float> optimizer(config.optimizer);
  const int unknown = corpus.domains().unknown_id();

  std::mt19937_64 rng(mix_seed(config.seed, 0));
  std::mt19937_64 aux_rng(mix_seed(config.seed, 1));
  std::vector<DomainIterator> iterators;
  std::size_t steps_per_epoch = 0;
  std::size_t total_train = 0;
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  for (const auto& s : sources) {
    std::vector<const EncodedDocument*> docs;
    for (const auto& d : s.train) docs.push_back(&d);
    iterators.emplace_back(std::move(docs), mix_seed(config.seed, 100 + static_cast<std::uint64_t>(s.id)));
    steps_per_epoch += (s.train.size() + batch_size - 1) / batch_size;
    total_train += s.train.size();
  }

  const Strategy base = config.base_strategy();
  const ExternalFeatures* features = options.features;
  auto make_objective = [&](std::vector<const EncodedDocument*> batch, std::vector<int> tags,
                            std::uint64_t dropout_seed) -> Objective<float> {
    const ForwardOptions fo{true, dropout_seed, nullptr};
    switch (base) {
      case Strategy::tag:
        return [&model_config, batch = std::move(batch), tags = std::move(tags), fo](
                   const ParameterStore& p, GradientStore* g) {
          return tag_step<float>(model_config, p, batch, tags, g, fo);
        };
      case Strategy::pretrained:
        return [&model_config, batch = std::move(batch), features, fo](const ParameterStore& p, GradientStore* g) {
          return pretrained_step<float>(model_config, p, batch, *features, g, fo);
        };
      default:
        return [&model_config, batch = std::move(batch), fo](const ParameterStore& p, GradientStore* g) {
          return joint_step<float>(model_config, p, batch, g, fo);
        };
    }
  };
  const double relabel_prob = meta && !config.meta_relabel ? 0.0 : config.relabel_prob;
  auto draw = [&](std::size_t source, std::mt19937_64& stream) {
    auto batch = iterators[source].next(batch_size);
    const std::uint64_t dropout_seed = stream();
    std::vector<int> tags;
    if (base == Strategy::tag) {
      const std::vector<int> ids(batch.size(), sources[source].id);
      tags = tag_relabel(ids, relabel_prob, unknown, stream);
    }
    return make_objective(std::move(batch), std::move(tags), dropout_seed);
  };

  MetaOptions meta_options;
  meta_options.gamma = config.gamma;
  meta_options.inner_step_size = config.resolved_inner_step();
  meta_options.second_order = config.meta_second_order;
  meta_options.normalize = config.meta_normalize;

  Checkpoint current;
  current.config = model_config;
  current.vocab = vocab;
  current.domains = corpus.domains().names();
  for (const auto& s : sources) current.source_domains.push_back(s.name);
  current.strategy = std::string(to_string(config.strategy));
  current.limits = config.limits;
  for (const auto& [key, value] : train_config_entries(config)) current.metadata[key] = value;

  TrainReport report;
  report.strategy = config.strategy;
  report.source_domains = current.source_domains;
  report.best_valid_rouge1 = -std::numeric_limits<double>::infinity();
  ParameterStore best = params;
  GradientStore grads = params.zeros_like();
  std::size_t step = 0;
  int since_best = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    std::vector<double> loss_sum(sources.size(), 0.0);
    std::vector<std::size_t> loss_count(sources.size(), 0);
    for (std::size_t s = 0; s < steps_per_epoch; ++s, ++step) {
      std::size_t k = step % sources.size();
      if (!meta && config.domain_schedule == DomainSchedule::proportional) {
        const double u = uniform01(rng) * static_cast<double>(total_train);
        double acc = 0.0;
        k = sources.size() - 1;
        for (std::size_t i = 0; i < sources.size(); ++i) {
          acc += static_cast<double>(sources[i].train.size());
          if (u < acc) {
            k = i;
            break;
          }
        }
      }
      const Objective<float> main = draw(k, rng);
      float loss = 0.0f;
      if (meta) {
        std::vector<Objective<float>> aux;
        if (config.gamma != 1.0) {
          for (std::size_t j = 0; j < sources.size(); ++j) {
            if (j != k) aux.push_back(draw(j, aux_rng));
          }
        }
        loss = meta_step<float>(params, main, aux, meta_options, &grads);
      } else {
        loss = main(params, &grads);
      }
      optimizer.apply(params, grads, config.learning_rate);
      loss_sum[k] += loss;
      ++loss_count[k];
    }
    for (std::size_t i = 0; i < sources.size(); ++i) {
      record.train_loss.push_back(loss_count[i] ? loss_sum[i] / static_cast<double>(loss_count[i])
                                                : std::numeric_limits<double>::quiet_NaN());
    }

    current.params = params;
    EvalOptions eval_options;
    eval_options.k = static_cast<std::size_t>(config.eval_k);
    eval_options.policy = TagPolicy::true_tag;
    eval_options.workers = options.workers;
    eval_options.features = features;
    double rouge_sum = 0.0;
    std::size_t rouge_domains = 0;
    for (const auto& s : sources) {
      if (s.valid.empty()) {
        record.valid_loss.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const auto tag = resolve_tag(current, s.name, TagPolicy::true_tag);
      std::vector<ScoringInput> inputs;
      bool labeled = true;
      for (const auto& doc : s.valid) {
        labeled = labeled && doc.labels.size() == doc.sentences.size();
        ScoringInput in{&doc, tag, {}};
        if (model_config.external_feature_dim > 0) {
          for (std::size_t i = 0; i < doc.sentences.size(); ++i) in.features.push_back(features->at(doc.doc_id, i));
        }
        inputs.push_back(std::move(in));
      }
      record.valid_loss.push_back(labeled ? static_cast<double>(loss_and_gradients<float>(
                                                model_config, params, inputs, nullptr, {}))
                                          : std::numeric_limits<double>::quiet_NaN());
      const auto result = evaluate_model(current, s.valid_raw, corpus.domains(), eval_options);
      rouge_sum += result.domains.front().mean.rouge1.f1;
      ++rouge_domains;
    }
    record.valid_rouge1 = rouge_domains ? rouge_sum / static_cast<double>(rouge_domains)
                                        : std::numeric_limits<double>::quiet_NaN();
    record.improved = rouge_domains == 0 || record.valid_rouge1 > report.best_valid_rouge1;
    if (record.improved) {
      best = params;
      report.best_epoch = epoch;
      report.best_valid_rouge1 = record.valid_rouge1;
      since_best = 0;
    } else {
      ++since_best;
    }
    report.epochs.push_back(record);
    if (options.on_epoch) options.on_epoch(record);
    if (config.patience > 0 && since_best >= config.patience && epoch < config.epochs) {
      report.early_stopped = true;
      break;
    }
  }
  report.steps = step;

  TrainResult result;
  current.params = std::move(best);
  current.metadata["best_epoch"] = fmt::format("{}", report.best_epoch);
  if (!options.checkpoint_path.empty()) {
    save_checkpoint(current, options.checkpoint_path);
    report.checkpoint_path = options.checkpoint_path.string();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.report = std::move(report);
  result.checkpoint = std::move(current);
  return result;
}

}  // namespace msum

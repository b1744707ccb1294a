// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "msum/error.hpp"
#include "msum/labeling.hpp"
#include "msum/train.hpp"

namespace msum {

std::vector<std::size_t> select_top_k(std::span<const float> probabilities, std::size_t k) {
  std::vector<std::size_t> order(probabilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (probabilities[a] != probabilities[b]) return probabilities[a] > probabilities[b];
                      return a < b;
                    });
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

std::string_view to_string(TagPolicy policy) {
  return policy == TagPolicy::true_tag ? "true_tag" : "unknown_tag";
}

std::optional<int> resolve_tag(const Checkpoint& model, std::string_view domain, TagPolicy policy) {
  if (!model.config.use_domain_tags) return std::nullopt;
  const int unknown = static_cast<int>(model.domains.size());
  if (policy == TagPolicy::unknown_tag) return unknown;
  const auto& src = model.source_domains;
  if (std::find(src.begin(), src.end(), domain) == src.end()) return unknown;
  const auto it = std::find(model.domains.begin(), model.domains.end(), domain);
  if (it == model.domains.end()) return unknown;
  return static_cast<int>(it - model.domains.begin());
}

RougeTriple mean_triple(std::span<const RougeTriple> scores) {
  RougeTriple out;
  if (scores.empty()) return out;
  auto acc = [](RougeScore& dst, const RougeScore& s) {
    dst.precision += s.precision;
    dst.recall += s.recall;
    dst.f1 += s.f1;
  };
  for (const auto& s : scores) {
    acc(out.rouge1, s.rouge1);
    acc(out.rouge2, s.rouge2);
    acc(out.rougeL, s.rougeL);
  }
  const double n = static_cast<double>(scores.size());
  for (auto* r : {&out.rouge1, &out.rouge2, &out.rougeL}) {
    r->precision /= n;
    r->recall /= n;
    r->f1 /= n;
  }
  return out;
}

namespace {

void check_model_vocab(const Checkpoint& model) {
  if (model.config.external_feature_dim > 0) return;
  const auto* emb = model.params.find("embedding");
  if (emb == nullptr || emb->rows() != model.vocab.size()) {
    throw Error(ErrorKind::input,
                fmt::format("model embedding has {} rows but its vocabulary has {} entries",
                            emb == nullptr ? 0 : emb->rows(), model.vocab.size()));
  }
}

DocumentEval evaluate_document(const Checkpoint& model, const Document& doc, const std::string& domain,
                               const EvalOptions& options) {
  DocumentEval out;
  out.doc_id = doc.doc_id;
  out.domain = domain;
  out.sentences = doc.sentences.size();
  const auto tag = resolve_tag(model, domain, options.policy);
  out.tag = tag.value_or(-1);

  const EncodedDocument encoded = encode_document(doc, model.vocab, model.limits);
  ScoringInput input{&encoded, tag, {}};
  if (model.config.external_feature_dim > 0) {
    if (options.features == nullptr) {
      throw Error(ErrorKind::usage, "model consumes external features but none were supplied");
    }
    for (std::size_t i = 0; i < encoded.sentences.size(); ++i) {
      input.features.push_back(options.features->at(doc.doc_id, i));
    }
  }
  const auto probs = score_sentences(model.config, model.params, input);
  out.selected = select_top_k(probs, options.k);
  out.scores = score_selection(doc, out.selected);
  return out;
}

}  // namespace

EvalResult evaluate_model(const Checkpoint& model, std::span<const Document* const> docs,
                          const DomainRegistry& domains, const EvalOptions& options) {
  if (options.k < 1) throw Error(ErrorKind::usage, "k must be >= 1");
  check_model_vocab(model);

  std::vector<const Document*> sorted(docs.begin(), docs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });

  EvalResult result;
  result.documents.resize(sorted.size());
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(sorted.size(), 1));
  auto run = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < sorted.size(); i += step) {
      const auto& doc = *sorted[i];
      result.documents[i] = evaluate_document(model, doc, domains.at(doc.domain).name, options);
    }
  };
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          run(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::map<int, std::vector<RougeTriple>> per_domain;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    per_domain[sorted[i]->domain].push_back(result.documents[i].scores);
    result.tags_used[result.documents[i].domain].insert(result.documents[i].tag);
  }
  for (const auto& [id, scores] : per_domain) {
    result.domains.push_back({domains.at(id).name, scores.size(), mean_triple(scores)});
  }
  return result;
}

double delta_r(double in_average, double out_average) { return std::abs(in_average - out_average); }

namespace {

SettingScores evaluate_setting(const Checkpoint& model, const Corpus& corpus, const std::vector<int>& domain_ids,
                               const EvalOptions& options, EvalReport& report) {
  std::vector<const Document*> docs;
  for (int d : domain_ids) {
    auto part = corpus.select(d, Split::test);
    docs.insert(docs.end(), part.begin(), part.end());
  }
  SettingScores out;
  if (docs.empty()) return out;
  auto result = evaluate_model(model, docs, corpus.domains(), options);
  std::vector<RougeTriple> means;
  for (const auto& d : result.domains) means.push_back(d.mean);
  out.domains = std::move(result.domains);
  out.average = mean_triple(means);
  for (auto& [name, tags] : result.tags_used) report.tags_used[name].insert(tags.begin(), tags.end());
  for (auto& d : result.documents) report.documents.push_back(std::move(d));
  return out;
}

std::vector<int> all_domains(const Corpus& corpus) {
  std::vector<int> ids(corpus.domains().size());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

EvalReport evaluate_settings(const Checkpoint& model, const Corpus& corpus, const EvalOptions& options,
                             const Corpus* cross) {
  EvalReport report;
  EvalOptions in_options = options;
  in_options.policy = TagPolicy::true_tag;
  report.in_domain = evaluate_setting(model, corpus, corpus.source_domains(), in_options, report);

  EvalOptions out_options = options;
  out_options.policy = TagPolicy::unknown_tag;
  report.out_of_domain = evaluate_setting(model, corpus, corpus.heldout_domains(), out_options, report);

  if (cross != nullptr) {
    report.cross_dataset = evaluate_setting(model, *cross, all_domains(*cross), in_options, report);
  }
  if (!report.in_domain.empty() && !report.out_of_domain.empty()) {
    report.delta_r = delta_r(report.in_domain.average.rouge1.f1, report.out_of_domain.average.rouge1.f1);
  }
  return report;
}

EvalMatrix derive_matrix(std::vector<std::string> domains, std::vector<std::vector<double>> R) {
  const std::size_t K = domains.size();
  if (R.size() != K) throw Error(ErrorKind::usage, "matrix R must be square over its domains");
  for (const auto& row : R) {
    if (row.size() != K) throw Error(ErrorKind::usage, "matrix R must be square over its domains");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorKind::numeric, "matrix R has a non-finite entry");
    }
  }
  EvalMatrix m;
  m.V.assign(K, std::vector<double>(K, 0.0));
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) m.V[i][j] = i == j ? R[i][i] : R[i][j] - R[j][j];
  }
  m.domains = std::move(domains);
  m.R = std::move(R);
  return m;
}

EvalMatrix cross_domain_matrix(std::span<const Checkpoint> models, const Corpus& corpus,
                               const EvalOptions& options) {
  if (models.empty()) throw Error(ErrorKind::usage, "cross-domain matrix needs at least one model");
  std::vector<std::string> names;
  std::vector<int> ids;
  for (const auto& m : models) {
    if (m.source_domains.size() != 1) {
      throw Error(ErrorKind::input,
                  fmt::format("matrix models must be trained on one domain, got {}", m.source_domains.size()));
    }
    const auto id = corpus.domains().find(m.source_domains.front());
    if (!id) {
      throw Error(ErrorKind::input,
                  fmt::format("model domain '{}' is not in the corpus", m.source_domains.front()));
    }
    if (std::find(names.begin(), names.end(), m.source_domains.front()) != names.end()) {
      throw Error(ErrorKind::input, fmt::format("two matrix models for domain '{}'", m.source_domains.front()));
    }
    names.push_back(m.source_domains.front());
    ids.push_back(*id);
  }
  const std::size_t K = names.size();
  std::vector<std::vector<double>> R(K, std::vector<double>(K, 0.0));
  EvalOptions opts = options;
  opts.policy = TagPolicy::true_tag;
  for (std::size_t j = 0; j < K; ++j) {
    const auto docs = corpus.select(ids[j], Split::test);
    if (docs.empty()) throw Error(ErrorKind::input, fmt::format("domain '{}' has no test documents", names[j]));
    for (std::size_t i = 0; i < K; ++i) {
      const auto result = evaluate_model(models[i], docs, corpus.domains(), opts);
      R[i][j] = 100.0 * result.domains.front().mean.rouge1.f1;
    }
  }
  return derive_matrix(std::move(names), std::move(R));
}

double relative_position(std::size_t index, std::size_t n_sentences) {
  if (n_sentences <= 1) return 0.0;
  return static_cast<double>(index) / static_cast<double>(n_sentences - 1);
}

std::vector<double> position_mass(std::span<const std::vector<std::size_t>> selections,
                                  std::span<const std::size_t> n_sentences, std::size_t bins) {
  if (bins < 2) throw Error(ErrorKind::usage, "histogram needs at least 2 bins");
  if (selections.size() != n_sentences.size()) {
    throw Error(ErrorKind::usage, "histogram selections and document lengths differ in count");
  }
  std::vector<double> mass(bins, 0.0);
  std::size_t total = 0;
  for (std::size_t d = 0; d < selections.size(); ++d) {
    for (std::size_t idx : selections[d]) {
      if (idx >= n_sentences[d]) throw Error(ErrorKind::usage, "selected sentence index out of range");
      const double pos = relative_position(idx, n_sentences[d]);
      const auto bin = std::min(static_cast<std::size_t>(pos * static_cast<double>(bins)), bins - 1);
      mass[bin] += 1.0;
      ++total;
    }
  }
  if (total > 0) {
    for (auto& m : mass) m /= static_cast<double>(total);
  }
  return mass;
}

PositionHistogram position_histogram(std::span<const std::vector<std::size_t>> truth,
                                     std::span<const std::vector<std::size_t>> model,
                                     std::span<const std::size_t> n_sentences, std::size_t bins) {
  return {bins, position_mass(truth, n_sentences, bins), position_mass(model, n_sentences, bins)};
}

std::vector<GammaRow> gamma_sweep(const Corpus& corpus, const TrainConfig& base, std::span<const double> gammas,
                                  const EvalOptions& options, const Corpus* cross) {
  if (gammas.empty()) throw Error(ErrorKind::usage, "gamma sweep needs at least one gamma");
  std::vector<GammaRow> rows;
  for (double gamma : gammas) {
    TrainConfig config = base;
    config.strategy = Strategy::meta;
    config.gamma = gamma;
    TrainOptions train_options;
    train_options.features = options.features;
    train_options.workers = options.workers;
    const auto trained = train(corpus, config, train_options);
    const auto report = evaluate_settings(trained.checkpoint, corpus, options, cross);
    GammaRow row;
    row.gamma = gamma;
    row.in_domain = report.in_domain.average.mean_f1();
    if (!report.out_of_domain.empty()) row.out_of_domain = report.out_of_domain.average.mean_f1();
    if (report.cross_dataset && !report.cross_dataset->empty()) {
      row.cross_dataset = report.cross_dataset->average.mean_f1();
    }
    row.delta_r = report.delta_r;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace msum

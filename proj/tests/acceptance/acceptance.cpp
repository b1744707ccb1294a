// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero when any criterion fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cli.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "msum/classifier.hpp"
#include "msum/eval.hpp"
#include "msum/features.hpp"
#include "msum/labeling.hpp"
#include "msum/metrics.hpp"
#include "msum/stats.hpp"
#include "msum/strategies.hpp"
#include "msum/synth.hpp"
#include "msum/train.hpp"
#include "oracles.hpp"
#include "output.hpp"

namespace msum {
namespace {

namespace fs = std::filesystem;
using oracle::Words;

struct Outcome {
  enum Status { pass, fail, skip } status = fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

Words random_words(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len, std::size_t vocab) {
  Words w(min_len + rng() % (max_len - min_len + 1));
  for (auto& t : w) t = "t" + std::to_string(rng() % vocab);
  return w;
}

// 1. ROUGE-L LCS and extractive fragments against brute force.
Outcome metric_oracles() {
  std::mt19937_64 rng(101);
  std::size_t lcs_bad = 0, frag_bad = 0;
  const std::size_t cases = 2000;
  for (std::size_t i = 0; i < cases; ++i) {
    const auto a = random_words(rng, 0, 8, 1 + rng() % 4);
    const auto b = random_words(rng, 0, 8, 1 + rng() % 4);
    if (lcs_length(a, b) != oracle::lcs_exhaustive(a, b)) ++lcs_bad;
    const auto r = rouge_l(a, b);
    const auto want = oracle::prf(static_cast<double>(oracle::lcs_exhaustive(a, b)), static_cast<double>(a.size()),
                                  static_cast<double>(b.size()));
    if (std::abs(r.f1 - want.f) > 1e-12) ++lcs_bad;
  }
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t vocab = 2 + rng() % 6;
    const auto doc = random_words(rng, 1, 30, vocab);
    const auto summary = random_words(rng, 1, 10, vocab + 2);
    const auto got = extractive_fragments(doc, summary);
    const auto want = oracle::fragments_brute(doc, summary);
    bool ok = got.fragments.size() == want.size();
    double cov = 0, den = 0;
    for (std::size_t k = 0; ok && k < want.size(); ++k) {
      ok = got.fragments[k].doc_start == want[k].doc_start && got.fragments[k].summary_start == want[k].summary_start &&
           got.fragments[k].length == want[k].length;
      cov += static_cast<double>(want[k].length);
      den += static_cast<double>(want[k].length * want[k].length);
    }
    const double s = static_cast<double>(summary.size());
    ok = ok && std::abs(got.coverage - cov / s) < 1e-12 && std::abs(got.density - den / s) < 1e-12 &&
         std::abs(got.compression - static_cast<double>(doc.size()) / s) < 1e-12;
    if (!ok) ++frag_bad;
  }
  return verdict(lcs_bad == 0 && frag_bad == 0,
                 fmt::format("{} LCS cases, {} mismatches; {} fragment cases, {} mismatches", cases, lcs_bad, cases,
                             frag_bad));
}

std::vector<Words> tokens_of(const Document& d) {
  std::vector<Words> out;
  for (const auto& s : d.sentences) out.push_back(s.tokens);
  return out;
}

// 2. Greedy oracle against an independent greedy and exhaustive search.
Outcome oracle_labeling() {
  std::mt19937_64 rng(202);
  std::size_t mismatched = 0, above_bound = 0, constructed_bad = 0;
  const std::size_t cases = 500;
  for (std::size_t c = 0; c < cases; ++c) {
    std::vector<std::string> sents;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      std::string s;
      for (std::size_t t = 0; t < 2 + rng() % 7; ++t) s += fmt::format("w{} ", rng() % 10);
      sents.push_back(s);
    }
    std::string ref;
    for (std::size_t t = 0; t < 3 + rng() % 10; ++t) ref += fmt::format("w{} ", rng() % 12);
    const auto doc = testing::make_doc(sents, {ref});
    const auto got = greedy_oracle(doc, 3);
    const auto [order, value] = oracle::greedy(tokens_of(doc), doc.flat_reference(), 3);
    const double achieved = got.cumulative.empty() ? 0.0 : got.cumulative.back();
    if (got.selection_order != order || std::abs(achieved - value) > 1e-12) ++mismatched;
    if (achieved > oracle::exhaustive_best(tokens_of(doc), doc.flat_reference(), 3) + 1e-12) ++above_bound;
  }
  // Constructed cases: the reference is a verbatim copy of up to three
  // sentences with private vocabularies.
  const std::size_t constructed = 200;
  for (std::size_t c = 0; c < constructed; ++c) {
    const std::size_t n = 3 + rng() % 6;
    std::vector<std::string> sents;
    for (std::size_t i = 0; i < n; ++i) {
      std::string s;
      for (std::size_t t = 0; t < 3 + rng() % 5; ++t) s += fmt::format("s{}x{} ", i, t);
      sents.push_back(s);
    }
    std::vector<std::size_t> picks(n);
    std::iota(picks.begin(), picks.end(), 0);
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(1 + rng() % 3);
    std::sort(picks.begin(), picks.end());
    std::vector<std::string> ref;
    for (auto i : picks) ref.push_back(sents[i]);
    const auto doc = testing::make_doc(sents, ref);
    const auto got = greedy_oracle(doc, 3);
    std::vector<int> want(n, 0);
    for (auto i : picks) want[i] = 1;
    const double best = oracle::exhaustive_best(tokens_of(doc), doc.flat_reference(), 3);
    if (got.labels != want || std::abs(got.cumulative.back() - best) > 1e-12 ||
        std::abs(ext_oracle_eval(doc).rouge1.f1 - 1.0) > 1e-12) {
      ++constructed_bad;
    }
  }
  return verdict(mismatched == 0 && above_bound == 0 && constructed_bad == 0,
                 fmt::format("{} random docs: {} differ from independent greedy, {} exceed exhaustive bound; "
                             "{} constructed docs: {} mismatches",
                             cases, mismatched, above_bound, constructed, constructed_bad));
}

ModelConfig toy_model(bool tags, int feature_dim) {
  ModelConfig c = testing::tiny_model();
  c.dropout_rate = 0.2;
  c.use_domain_tags = tags;
  c.external_feature_dim = feature_dim;
  return c;
}

EncodedDocument toy_document() {
  EncodedDocument d;
  d.doc_id = "toy";
  d.sentences = {{2, 3, 4}, {5, 6}, {7, 2, 8, 9}};
  d.labels = {1, 0, 1};
  return d;
}

// Central-difference step of the 64-bit gradient check.
constexpr double kFdStep = 1e-3;

// 3. Finite-difference gradients and the meta toy.
Outcome gradient_fidelity() {
  const auto doc = toy_document();
  const std::vector<const EncodedDocument*> batch{&doc};
  const ForwardOptions fo{true, 12345, nullptr};
  constexpr std::size_t kVocab = 10;
  std::map<std::string, double> errors;

  auto shadow = [&](const ModelConfig& c, std::uint64_t seed) {
    auto p = init_params(c, kVocab, 2, seed);
    testing::randomize(p, seed + 1);
    return p.cast<double>();
  };
  {
    const auto c = toy_model(false, 0);
    const auto p = shadow(c, 1);
    auto g = p.zeros_like();
    joint_step<double>(c, p, batch, &g, fo);
    errors["joint"] = testing::max_relative_error(
        p, g, [&](const BasicParameterStore<double>& q) { return joint_step<double>(c, q, batch, nullptr, fo); }, 1e-6, kFdStep);
  }
  {
    const auto c = toy_model(true, 0);
    const auto p = shadow(c, 2);
    const std::vector<int> tags{1};
    auto g = p.zeros_like();
    tag_step<double>(c, p, batch, tags, &g, fo);
    errors["tag"] = testing::max_relative_error(
        p, g, [&](const BasicParameterStore<double>& q) { return tag_step<double>(c, q, batch, tags, nullptr, fo); },
        1e-6, kFdStep);
  }
  {
    const auto c = toy_model(false, 5);
    const auto p = shadow(c, 3);
    ExternalFeatures features(5);
    std::mt19937_64 rng(4);
    std::vector<std::vector<float>> rows(3, std::vector<float>(5));
    for (auto& r : rows) {
      for (auto& v : r) v = static_cast<float>(static_cast<double>(rng() % 2001) / 1000.0 - 1.0);
    }
    features.add("toy", rows);
    auto g = p.zeros_like();
    pretrained_step<double>(c, p, batch, features, &g, fo);
    errors["pretrained"] = testing::max_relative_error(
        p, g,
        [&](const BasicParameterStore<double>& q) {
          return pretrained_step<double>(c, q, batch, features, nullptr, fo);
        },
        1e-6, kFdStep);
  }

  auto quadratic = [](double c) -> Objective<double> {
    return [c](const BasicParameterStore<double>& p, BasicGradientStore<double>* g) {
      const double t = p.at("theta")[0];
      if (g) g->at("theta")[0] = 2 * (t - c);
      return (t - c) * (t - c);
    };
  };
  BasicParameterStore<double> theta;
  theta.add("theta", BasicTensor<double>({1}, std::vector<double>{0.0}));
  const std::vector<Objective<double>> aux{quadratic(-1.0)};
  MetaOptions mo;
  mo.gamma = 0.5;
  mo.inner_step_size = 0.1;
  auto g = theta.zeros_like();
  meta_step<double>(theta, quadratic(1.0), aux, mo, &g);
  const double first_order = g.at("theta")[0];
  mo.second_order = true;
  meta_step<double>(theta, quadratic(1.0), aux, mo, &g);
  const double second_order = g.at("theta")[0];
  // γ·L_k'(θ) + (1−γ)(1 − 2α)·L_j'(θ − α L_k'(θ)) at θ = 0.
  const double analytic = 0.5 * -2.0 + 0.5 * (1 - 2 * 0.1) * 2 * (0.2 + 1);

  const double worst = std::max({errors["joint"], errors["tag"], errors["pretrained"]});
  const bool ok = worst <= 1e-4 && std::abs(first_order - 0.2) <= 1e-9 && std::abs(second_order - analytic) <= 1e-6;
  return verdict(ok, fmt::format("max rel err joint {:.2e} tag {:.2e} pretrained {:.2e}; first-order {:.12f} "
                                 "(want 0.2); second-order {:.9f} (want {:.9f})",
                                 errors["joint"], errors["tag"], errors["pretrained"], first_order, second_order,
                                 analytic));
}

// 4. γ = 1 and α = 0 identities of the meta gradient.
Outcome meta_identities() {
  constexpr std::size_t kVocab = 10;
  std::mt19937_64 rng(404);
  std::vector<EncodedDocument> docs(6);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    docs[i].doc_id = fmt::format("d{}", i);
    for (std::size_t s = 0; s < 2 + rng() % 3; ++s) {
      std::vector<std::int32_t> ids(1 + rng() % 5);
      for (auto& t : ids) t = static_cast<std::int32_t>(2 + rng() % (kVocab - 2));
      docs[i].sentences.push_back(ids);
      docs[i].labels.push_back(static_cast<int>(rng() % 2));
    }
  }
  const std::vector<const EncodedDocument*> b0{&docs[0], &docs[1]}, b1{&docs[2], &docs[3]}, b2{&docs[4], &docs[5]};
  const ForwardOptions fo{true, 77, nullptr};

  bool identical = true;
  for (bool tags : {true, false}) {
    const auto c = toy_model(tags, 0);
    auto p = init_params(c, kVocab, 3, 5);
    testing::randomize(p, 6);
    const std::vector<int> t0{0, 3}, t1{1, 1}, t2{2, 3};
    auto step = [&, tags](auto batch, std::vector<int> t) -> Objective<float> {
      return [&, batch, t, tags](const ParameterStore& q, GradientStore* g) {
        return tags ? tag_step<float>(c, q, batch, t, g, fo) : joint_step<float>(c, q, batch, g, fo);
      };
    };
    auto base = p.zeros_like();
    const float want = step(b0, t0)(p, &base);
    const std::vector<Objective<float>> aux{step(b1, t1), step(b2, t2)};
    MetaOptions mo;
    mo.gamma = 1.0;
    auto got = p.zeros_like();
    const float loss = meta_step<float>(p, step(b0, t0), aux, mo, &got);
    identical = identical && loss == want && got == base;
  }

  const auto c = toy_model(false, 0);
  auto p = init_params(c, kVocab, 3, 7).cast<double>();
  testing::randomize(p, 8);
  auto step = [&](auto batch) -> Objective<double> {
    return [&, batch](const BasicParameterStore<double>& q, BasicGradientStore<double>* g) {
      return joint_step<double>(c, q, batch, g, fo);
    };
  };
  const std::vector<Objective<double>> aux{step(b1), step(b2)};
  MetaOptions mo;
  mo.gamma = 0.35;
  mo.inner_step_size = 0.0;
  auto got = p.zeros_like();
  meta_step<double>(p, step(b0), aux, mo, &got);
  auto g0 = p.zeros_like(), g1 = p.zeros_like(), g2 = p.zeros_like();
  step(b0)(p, &g0);
  step(b1)(p, &g1);
  step(b2)(p, &g2);
  auto want = p.zeros_like();
  want.axpy(0.35, g0);
  want.axpy(0.65, g1);
  want.axpy(0.65, g2);
  double worst = 0;
  for (const auto& e : want) {
    for (std::size_t i = 0; i < e.tensor.size(); ++i) worst = std::max(worst, std::abs(got.at(e.name)[i] - e.tensor[i]));
  }
  return verdict(identical && worst <= 1e-9,
                 fmt::format("gamma=1 bit-identical to base step: {}; alpha=0 max deviation from mixture {:.2e}",
                             identical ? "yes" : "no", worst));
}

// Shared setup of the synthetic domain-shift experiments.
TrainConfig experiment_config(Strategy strategy, std::uint64_t seed) {
  TrainConfig c;
  c.strategy = strategy;
  c.seed = seed;
  c.epochs = 5;
  c.batch_size = 16;
  c.optimizer.kind = OptimizerKind::adam;
  c.learning_rate = 0.003;
  c.model.embed_dim = 32;
  c.model.conv_filter_widths = {1, 2, 3};
  c.model.conv_filters_per_width = 16;
  c.model.model_dim = 32;
  c.model.attention_heads = 2;
  c.model.ffn_dim = 64;
  c.model.tag_embed_dim = 8;
  return c;
}

const Corpus& shift3(std::uint64_t seed) {
  static std::map<std::uint64_t, Corpus> cache;
  auto it = cache.find(seed);
  if (it == cache.end()) {
    it = cache.emplace(seed, testing::label_all(make_synthetic_corpus(synth_preset("shift3"), seed))).first;
  }
  return it->second;
}

std::string format_matrix(const std::vector<std::string>& names, const std::vector<std::vector<double>>& m) {
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<std::string> cells;
    for (double v : m[i]) cells.push_back(fmt::format("{:.2f}", v));
    rows.push_back(fmt::format("{}:[{}]", names[i], fmt::join(cells, " ")));
  }
  return fmt::format("{}", fmt::join(rows, " "));
}

// 5. Off-diagonal V entries are negative (median over seeds).
Outcome domain_shift() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> names;
  std::vector<std::vector<std::vector<double>>> per_seed;
  for (auto seed : kSeeds) {
    const Corpus& corpus = shift3(seed);
    names = corpus.domains().names();
    std::vector<Checkpoint> models;
    for (const auto& name : names) {
      std::vector<std::string> others;
      for (const auto& n : names) {
        if (n != name) others.push_back(n);
      }
      const auto single = corpus.with_partition({{name}, others});
      models.push_back(train(single, experiment_config(Strategy::joint, seed)).checkpoint);
    }
    per_seed.push_back(cross_domain_matrix(models, corpus).V);
  }
  const std::size_t k = names.size();
  std::vector<std::vector<double>> med(k, std::vector<double>(k));
  bool negative = true;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> cell;
      for (const auto& v : per_seed) cell.push_back(v[i][j]);
      med[i][j] = median(cell);
      if (i != j && !(med[i][j] < 0)) negative = false;
    }
  }
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  return verdict(negative && minutes < 15.0,
                 fmt::format("median V {}; {:.1f} min", format_matrix(names, med), minutes));
}

struct StrategyScores {
  double in_domain = 0;  // mean of ROUGE-1/2/L F1 over source domains, x100
  double delta_r = 0;    // ROUGE-1 gap, x100
};

StrategyScores score(const Checkpoint& model, const Corpus& corpus) {
  const auto report = evaluate_settings(model, corpus);
  return {100.0 * report.in_domain.average.mean_f1(), 100.0 * report.delta_r.value_or(NAN)};
}

// 6. Tag beats joint in-domain; meta ΔR <= tag ΔR <= joint ΔR.
Outcome strategy_ordering() {
  std::map<std::string, std::vector<double>> in, dr;
  for (auto seed : kSeeds) {
    const Corpus& corpus = shift3(seed);
    auto meta = experiment_config(Strategy::meta, seed);
    meta.gamma = 0.5;
    const std::vector<std::pair<std::string, TrainConfig>> runs{
        {"joint", experiment_config(Strategy::joint, seed)}, {"tag", experiment_config(Strategy::tag, seed)},
        {"meta", meta}};
    for (const auto& [name, config] : runs) {
      const auto s = score(train(corpus, config).checkpoint, corpus);
      in[name].push_back(s.in_domain);
      dr[name].push_back(s.delta_r);
    }
  }
  std::map<std::string, double> mi, md;
  for (const char* n : {"joint", "tag", "meta"}) {
    mi[n] = median(in[n]);
    md[n] = median(dr[n]);
  }
  const bool a = mi["tag"] >= mi["joint"];
  const bool b = md["meta"] <= md["tag"] && md["tag"] <= md["joint"];
  return verdict(a && b, fmt::format("(a) {}: in-domain joint {:.2f} tag {:.2f} meta {:.2f}; (b) {}: dR joint {:.2f} "
                                     "tag {:.2f} meta {:.2f}",
                                     a ? "holds" : "fails", mi["joint"], mi["tag"], mi["meta"], b ? "holds" : "fails",
                                     md["joint"], md["tag"], md["meta"]));
}

// 7. γ sweep direction between 0.25 and 1.0.
Outcome gamma_direction() {
  std::vector<double> in_low, in_high, dr_low, dr_high;
  const std::vector<double> gammas{0.25, 1.0};
  for (auto seed : kSeeds) {
    const auto rows = gamma_sweep(shift3(seed), experiment_config(Strategy::meta, seed), gammas);
    in_low.push_back(100 * rows[0].in_domain);
    in_high.push_back(100 * rows[1].in_domain);
    dr_low.push_back(100 * rows[0].delta_r.value_or(NAN));
    dr_high.push_back(100 * rows[1].delta_r.value_or(NAN));
  }
  const bool a = median(in_high) >= median(in_low);
  const bool b = median(dr_low) <= median(dr_high);
  return verdict(a && b, fmt::format("in-domain gamma=1.0 {:.2f} vs 0.25 {:.2f} ({}); dR gamma=0.25 {:.2f} vs 1.0 "
                                     "{:.2f} ({})",
                                     median(in_high), median(in_low), a ? "holds" : "fails", median(dr_low),
                                     median(dr_high), b ? "holds" : "fails"));
}

// 8. Domain classifier on marker domains and its permutation control.
Outcome domain_classifier_check() {
  const Corpus corpus = make_synthetic_corpus(synth_preset("markers5"), 8);
  const auto real = domain_classifier(corpus, 8);
  ClassifierConfig control;
  control.permute_labels = true;
  const auto permuted = domain_classifier(corpus, 8, control);
  const bool ok = real.accuracy >= 0.99 && std::abs(permuted.accuracy - real.chance) <= 0.05 &&
                  std::abs(real.chance - 0.2) < 1e-12;
  return verdict(ok, fmt::format("accuracy {:.2f}%, permuted labels {:.2f}%, chance {:.2f}% over {} test docs",
                                 100 * real.accuracy, 100 * permuted.accuracy, 100 * real.chance,
                                 real.test_documents));
}

struct PublicationRow {
  const char* name;
  double coverage, density, compression;
  double lead[3];
  double oracle[3];
};

// Published per-publication test-split measures of the MULTI-SUM corpus.
constexpr PublicationRow kPublications[] = {
    {"FN", 0.90, 16.18, 35.58, {40.30, 33.90, 38.74}, {73.61, 65.53, 71.50}},
    {"CNN", 0.85, 12.46, 38.28, {35.56, 25.60, 33.25}, {59.99, 46.66, 56.64}},
    {"MA", 0.84, 6.66, 28.93, {29.38, 19.15, 27.17}, {55.35, 40.97, 51.97}},
    {"NYT", 0.85, 9.19, 42.30, {28.24, 16.62, 25.20}, {52.25, 36.14, 47.73}},
    {"WTP", 0.76, 6.04, 63.52, {20.75, 10.57, 18.56}, {43.00, 27.14, 39.48}},
    {"NYDN", 0.93, 14.57, 21.25, {45.25, 37.69, 43.64}, {74.05, 64.84, 72.13}},
    {"WSJ", 0.80, 8.45, 23.64, {35.21, 23.70, 32.26}, {57.21, 43.08, 53.31}},
    {"USAT", 0.78, 6.35, 31.17, {25.11, 15.52, 23.03}, {47.22, 33.43, 44.05}},
    {"TG", 0.80, 2.75, 40.35, {21.66, 8.02, 18.24}, {41.23, 21.56, 35.90}},
    {"TIME", 0.75, 4.87, 47.67, {19.80, 10.83, 17.94}, {41.37, 26.04, 37.87}},
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// 9. Corpus statistics on user-supplied MULTI-SUM data.
Outcome multisum_stats() {
  const char* path = std::getenv("MSUM_MULTISUM_CORPUS");
  if (path == nullptr || *path == '\0') {
    return {Outcome::skip, "set MSUM_MULTISUM_CORPUS to a MULTI-SUM corpus file or bundle to run"};
  }
  const Corpus corpus = load_bundle(path, {{"FN", "CNN", "MA", "NYT", "WTP"}, {"NYDN", "WSJ", "USAT", "TG", "TIME"}});
  StatsOptions options;
  if (const char* k = std::getenv("MSUM_MULTISUM_LEAD_K")) options.lead_k = std::stoul(k);
  const auto stats = corpus_stats(corpus, options);
  std::vector<std::string> problems;
  std::size_t matched = 0;
  for (const auto& row : stats.domains) {
    const auto it = std::find_if(std::begin(kPublications), std::end(kPublications),
                                 [&](const PublicationRow& p) { return upper(row.name) == p.name; });
    if (it == std::end(kPublications) || !row.coverage) continue;
    ++matched;
    auto check = [&](const char* what, double got, double want, double tol) {
      if (std::abs(got - want) > tol) problems.push_back(fmt::format("{} {} {:.2f} vs {:.2f}", row.name, what, got, want));
    };
    check("coverage", *row.coverage, it->coverage, 0.02);
    check("density", *row.density, it->density, 0.5);
    check("compression", *row.compression, it->compression, 1.0);
    const RougeTriple& lead = *row.lead;
    const RougeTriple& orc = *row.oracle;
    const double lead_got[3] = {lead.rouge1.f1, lead.rouge2.f1, lead.rougeL.f1};
    const double orc_got[3] = {orc.rouge1.f1, orc.rouge2.f1, orc.rougeL.f1};
    for (int m = 0; m < 3; ++m) {
      check("lead", 100 * lead_got[m], it->lead[m], 1.0);
      check("oracle", 100 * orc_got[m], it->oracle[m], 1.0);
    }
  }
  if (matched == 0) return {Outcome::fail, "no domain of the supplied corpus matches a known publication"};
  return verdict(problems.empty(), fmt::format("{} publications compared; {}", matched,
                                               problems.empty() ? "all within tolerance"
                                                                : fmt::format("{}", fmt::join(problems, "; "))));
}

std::map<std::string, std::string> hash_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(f), {}};
    out[fs::relative(e.path(), dir).string()] = cli::git_blob_sha1(bytes);
  }
  return out;
}

// 10. Every command rerun with identical inputs gives identical bytes.
Outcome determinism() {
  testing::TempDir dir("acceptance_determinism");
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  const std::vector<std::vector<std::string>> commands{
      {"synth", "--spec", "demo", "--seed", "11", "--out", p("syn")},
      {"ingest", "--corpus", p("syn/corpus.jsonl"), "--source", "alpha", "beta", "--heldout", "gamma", "--out",
       p("ingest")},
      {"label", "--corpus", p("ingest"), "--out", p("label")},
      {"stats", "--corpus", p("label"), "--out", p("stats"), "--classifier", "--seed", "11"},
      {"train", "--corpus", p("label"), "--out", p("train_meta"), "--strategy", "meta", "--seed", "11"},
      {"train", "--corpus", p("label"), "--out", p("train_tag"), "--strategy", "tag", "--seed", "11"},
      {"eval", "--corpus", p("label"), "--checkpoint", p("train_meta/model.ckpt"), "--out", p("eval_meta"),
       "--workers", "3"},
      {"eval", "--corpus", p("label"), "--checkpoint", p("train_tag/model.ckpt"), "--out", p("eval_tag")},
      {"matrix", "--corpus", p("label"), "--out", p("matrix"), "--seed", "11", "--epochs", "2"},
      {"sweep-gamma", "--corpus", p("label"), "--out", p("sweep"), "--seed", "11", "--epochs", "2"},
      {"report", "--run", "meta=" + p("eval_meta"), "--run", "tag=" + p("eval_tag"), "--out", p("report")},
  };
  std::vector<std::string> changed;
  std::size_t files = 0;
  for (const auto& args : commands) {
    std::ostringstream out, err;
    if (cli::run(args, out, err) != 0) return {Outcome::fail, fmt::format("{} failed: {}", args[0], err.str())};
    const fs::path target = args[std::find(args.begin(), args.end(), "--out") - args.begin() + 1];
    const auto first = hash_tree(target);
    std::ostringstream out2, err2;
    if (cli::run(args, out2, err2) != 0) return {Outcome::fail, fmt::format("{} rerun failed", args[0])};
    const auto second = hash_tree(target);
    files += first.size();
    if (first != second) changed.push_back(args[0]);
  }
  return verdict(changed.empty(), fmt::format("{} commands, {} output files; {}", commands.size(), files,
                                              changed.empty() ? "all byte-identical"
                                                              : fmt::format("changed: {}", fmt::join(changed, ", "))));
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace msum

int main(int argc, char** argv) {
  using namespace msum;
  const std::vector<Criterion> criteria{
      {1, "metric oracle equivalence", metric_oracles},
      {2, "oracle labeling", oracle_labeling},
      {3, "gradient fidelity", gradient_fidelity},
      {4, "meta gradient identities", meta_identities},
      {5, "domain-shift matrix", domain_shift},
      {6, "strategy ordering", strategy_ordering},
      {7, "gamma sweep direction", gamma_direction},
      {8, "domain classifier", domain_classifier_check},
      {9, "MULTI-SUM statistics", multisum_stats},
      {10, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Outcome::fail, fmt::format("exception: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* status = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    if (o.status == Outcome::fail) ++failures;
    std::cout << fmt::format("criterion {:>2} {:<28} {}  {} [{:.1f}s]\n", c.id, c.name, status, o.detail, seconds)
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msum/checkpoint.hpp"
#include "msum/corpus.hpp"
#include "msum/features.hpp"
#include "msum/metrics.hpp"
#include "msum/strategies.hpp"

namespace msum {

/// Indices of the k largest probabilities (smaller index wins ties), sorted
/// by document position. k larger than the document selects everything.
std::vector<std::size_t> select_top_k(std::span<const float> probabilities, std::size_t k);

enum class TagPolicy { true_tag, unknown_tag };
std::string_view to_string(TagPolicy policy);

struct EvalOptions {
  std::size_t k = 2;
  TagPolicy policy = TagPolicy::true_tag;
  std::size_t workers = 1;
  const ExternalFeatures* features = nullptr;
};

struct DocumentEval {
  std::string doc_id;
  std::string domain;
  std::size_t sentences = 0;
  std::vector<std::size_t> selected;
  /// Tag row fed to the model, or -1 for models without a tag table.
  int tag = -1;
  RougeTriple scores;
};

struct DomainScores {
  std::string domain;
  std::size_t documents = 0;
  /// Component-wise mean over the domain's documents.
  RougeTriple mean;
};

struct EvalResult {
  /// Domains in registry order, only those with at least one document.
  std::vector<DomainScores> domains;
  /// Sorted by doc_id.
  std::vector<DocumentEval> documents;
  /// Tag rows used per domain name.
  std::map<std::string, std::set<int>> tags_used;
};

/// Tag row a model uses for a domain under `policy`. Domains the model was
/// not trained on always get the unknown row.
std::optional<int> resolve_tag(const Checkpoint& model, std::string_view domain, TagPolicy policy);

/// Scores top-k selections against the references. Results do not depend on
/// the order of `docs` or on the worker count.
EvalResult evaluate_model(const Checkpoint& model, std::span<const Document* const> docs,
                          const DomainRegistry& domains, const EvalOptions& options = {});

RougeTriple mean_triple(std::span<const RougeTriple> scores);

struct SettingScores {
  std::vector<DomainScores> domains;
  /// Mean over domains.
  RougeTriple average;
  bool empty() const { return domains.empty(); }
};

/// In-domain (source test splits, true tags), out-of-domain (held-out test
/// splits, unknown tag) and an optional cross-dataset setting.
struct EvalReport {
  SettingScores in_domain;
  SettingScores out_of_domain;
  std::optional<SettingScores> cross_dataset;
  /// |in − out| of ROUGE-1 F1, from unrounded averages; unset when either
  /// setting is empty.
  std::optional<double> delta_r;
  std::map<std::string, std::set<int>> tags_used;
  /// Per-document results of every setting, in setting order.
  std::vector<DocumentEval> documents;
};

double delta_r(double in_average, double out_average);

EvalReport evaluate_settings(const Checkpoint& model, const Corpus& corpus, const EvalOptions& options = {},
                             const Corpus* cross = nullptr);

/// R holds ROUGE-1 F1 ×100 of the model trained on domain i, tested on
/// domain j. V_ii = R_ii and V_ij = R_ij − R_jj.
struct EvalMatrix {
  std::vector<std::string> domains;
  std::vector<std::vector<double>> R;
  std::vector<std::vector<double>> V;
};

EvalMatrix derive_matrix(std::vector<std::string> domains, std::vector<std::vector<double>> R);

/// One single-source-domain model per row, evaluated on every row domain's
/// test split.
EvalMatrix cross_domain_matrix(std::span<const Checkpoint> models, const Corpus& corpus,
                               const EvalOptions& options = {});

/// index / (n − 1), and 0 for single-sentence documents.
double relative_position(std::size_t index, std::size_t n_sentences);

/// Normalized mass per equal-width bin over [0, 1]; position 1 falls in the
/// last bin. All zeros when there are no selections.
std::vector<double> position_mass(std::span<const std::vector<std::size_t>> selections,
                                  std::span<const std::size_t> n_sentences, std::size_t bins);

struct PositionHistogram {
  std::size_t bins = 0;
  std::vector<double> truth;
  std::vector<double> model;
};

inline constexpr std::size_t kDefaultHistogramBins = 20;

PositionHistogram position_histogram(std::span<const std::vector<std::size_t>> truth,
                                     std::span<const std::vector<std::size_t>> model,
                                     std::span<const std::size_t> n_sentences,
                                     std::size_t bins = kDefaultHistogramBins);

struct GammaRow {
  double gamma = 0.0;
  /// Mean of ROUGE-1/2/L F1 averaged over the setting's domains.
  double in_domain = 0.0;
  std::optional<double> out_of_domain;
  std::optional<double> cross_dataset;
  /// ROUGE-1 gap between in-domain and out-of-domain.
  std::optional<double> delta_r;
};

/// Trains one meta model per γ from the same seed and evaluates it.
std::vector<GammaRow> gamma_sweep(const Corpus& corpus, const TrainConfig& base,
                                  std::span<const double> gammas, const EvalOptions& options = {},
                                  const Corpus* cross = nullptr);

}  // namespace msum

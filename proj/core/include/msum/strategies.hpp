// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msum/features.hpp"
#include "msum/model.hpp"
#include "msum/optimizer.hpp"
#include "msum/tensor.hpp"
#include "msum/vocabulary.hpp"

namespace msum {

enum class Strategy { joint, pretrained, tag, meta };
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

enum class DomainSchedule { round_robin, proportional };
std::string_view to_string(DomainSchedule s);
std::optional<DomainSchedule> parse_domain_schedule(std::string_view text);

struct TrainConfig {
  Strategy strategy = Strategy::joint;
  /// Weight of the main-domain loss in a meta step.
  double gamma = 0.5;
  /// Inner step of the meta update; unset means learning_rate.
  std::optional<double> inner_step_size;
  double relabel_prob = 0.1;
  bool meta_second_order = false;
  /// Divide the auxiliary sum by the number of auxiliary domains.
  bool meta_normalize = false;
  /// Loss the meta objective is built on: joint, tag or pretrained.
  Strategy meta_base = Strategy::tag;
  /// Apply unknown-tag relabeling inside meta steps over a tag base.
  bool meta_relabel = true;

  int epochs = 5;
  int batch_size = 16;
  double learning_rate = 0.01;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  DomainSchedule domain_schedule = DomainSchedule::round_robin;
  /// Epochs without validation improvement before stopping; 0 disables.
  int patience = 2;
  /// Sentences selected per document when validating.
  int eval_k = 2;
  /// Validation documents per source domain; 0 means all.
  std::size_t max_valid_docs = 0;

  int vocab_min_frequency = Vocabulary::kDefaultMinFrequency;
  std::size_t vocab_max_size = Vocabulary::kDefaultMaxSize;
  EncodingLimits limits;
  ModelConfig model;
  /// External feature file, required by the pretrained strategy.
  std::string features_path;

  double resolved_inner_step() const { return inner_step_size.value_or(learning_rate); }
  /// Loss the strategy optimizes per batch (meta resolves to its base).
  Strategy base_strategy() const { return strategy == Strategy::meta ? meta_base : strategy; }
  bool uses_tags() const { return base_strategy() == Strategy::tag; }
  bool uses_features() const { return base_strategy() == Strategy::pretrained; }
  /// Model config with the tag table / feature projection switched on as the
  /// strategy requires.
  ModelConfig resolved_model(std::size_t feature_dim) const;
  void validate() const;
};

/// Replaces each id by `unknown_id` with probability `relabel_prob`.
std::vector<int> tag_relabel(std::span<const int> ids, double relabel_prob, int unknown_id,
                             std::mt19937_64& rng);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

using Batch = std::span<const EncodedDocument* const>;

/// Mean BCE over the batch without domain information.
template <typename T>
T joint_step(const ModelConfig& config, const BasicParameterStore<T>& params, Batch batch,
             BasicGradientStore<T>* grads, const ForwardOptions& options = {});

/// Sentence encodings consume the tag embedding of `tags[i]`.
template <typename T>
T tag_step(const ModelConfig& config, const BasicParameterStore<T>& params, Batch batch,
           std::span<const int> tags, BasicGradientStore<T>* grads,
           const ForwardOptions& options = {});

/// Sentence vectors come from the frozen provider through the learned projection.
template <typename T>
T pretrained_step(const ModelConfig& config, const BasicParameterStore<T>& params, Batch batch,
                  const ExternalFeatures& features, BasicGradientStore<T>* grads,
                  const ForwardOptions& options = {});

/// A deterministic loss over a fixed batch: returns L(θ) and, when `grads`
/// is non-null, overwrites it with ∇L(θ).
template <typename T>
using Objective = std::function<T(const BasicParameterStore<T>&, BasicGradientStore<T>*)>;

struct MetaOptions {
  double gamma = 0.5;
  double inner_step_size = 0.01;
  bool second_order = false;
  bool normalize = false;
  /// Central-difference step for Hessian-vector products, scaled by 1/|v|.
  double hvp_epsilon = 1e-4;
};

struct MetaLosses {
  double main = 0.0;
  std::vector<double> auxiliary;
  double total = 0.0;
};

/// total = γ·L_k(θ) + (1−γ)·Σ_j L_j(θ − α∇L_k(θ)).
/// The auxiliary gradient is ∇L_j at the adapted point (first order) or,
/// with second_order, (I − αH_k)∇L_j with H_k·v from central differences.
/// With γ = 1 the auxiliary objectives are never evaluated.
template <typename T>
T meta_step(const BasicParameterStore<T>& params, const Objective<T>& main,
            std::span<const Objective<T>> auxiliary, const MetaOptions& options,
            BasicGradientStore<T>* grads, MetaLosses* losses = nullptr);

}  // namespace msum

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "msum/autograd.hpp"
#include "msum/tensor.hpp"
#include "msum/vocabulary.hpp"

namespace msum {

/// Architecture of the sentence scorer: word embedding, convolutional
/// sentence encoder with max-over-time pooling, one self-attention document
/// block and a per-sentence sigmoid readout.
struct ModelConfig {
  int embed_dim = 64;
  std::vector<int> conv_filter_widths{3, 4, 5};
  int conv_filters_per_width = 32;
  int model_dim = 128;
  int attention_heads = 4;
  int ffn_dim = 256;
  int tag_embed_dim = 16;
  double dropout_rate = 0.1;
  bool use_positional_encoding = true;
  /// Adds a domain tag table (K real domains + the unknown tag).
  bool use_domain_tags = false;
  /// When > 0, sentence vectors come from fixed external features of this
  /// width instead of the convolutional encoder.
  int external_feature_dim = 0;

  void validate() const;
  /// Width of the pooled convolutional output (or of the projected features).
  int sentence_feature_dim() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Uniform(-0.1, 0.1) weights and embeddings, zero biases, unit layer-norm
/// gains and a zero classifier layer. Deterministic in `seed`.
ParameterStore init_params(const ModelConfig& config, std::size_t vocab_size,
                           std::size_t n_domains, std::uint64_t seed);

/// Names and shapes `init_params` would produce, used to validate checkpoints.
std::vector<std::pair<std::string, std::vector<std::size_t>>> expected_layout(
    const ModelConfig& config, std::size_t vocab_size, std::size_t n_domains);

/// One document to score. `features` holds one vector per sentence when the
/// model consumes external features and is empty otherwise.
struct ScoringInput {
  const EncodedDocument* doc = nullptr;
  std::optional<int> tag;
  std::vector<std::span<const float>> features;
};

/// Attention probabilities of the document block, one [n, n] matrix per head.
struct ForwardTrace {
  std::vector<std::vector<double>> attention;
  std::size_t sentences = 0;
};

struct ForwardOptions {
  bool training = false;
  std::uint64_t dropout_seed = 0;
  ForwardTrace* trace = nullptr;
};

/// Binds one tape to a parameter store and builds the scorer graph on it.
template <typename T>
class ScorerGraph {
 public:
  ScorerGraph(const ModelConfig& config, const BasicParameterStore<T>& params,
              BasicGradientStore<T>* grads, Tape<T>& tape, ForwardOptions options = {});

  /// [1, model_dim]
  VarId sentence(std::span<const std::int32_t> ids, std::optional<int> tag,
                 std::span<const float> external = {});
  /// [n, model_dim] contextual vectors.
  VarId document(std::span<const VarId> sentences);
  /// [n, 1] selection probabilities.
  VarId probabilities(VarId contextual);
  /// Full document pass: sentences, document block and readout.
  VarId score(const ScoringInput& input);

  Tape<T>& tape() { return tape_; }

 private:
  VarId param(const std::string& name);
  VarId dropout(VarId x);

  const ModelConfig& config_;
  const BasicParameterStore<T>& params_;
  BasicGradientStore<T>* grads_;
  Tape<T>& tape_;
  ForwardOptions options_;
  std::uint64_t dropout_state_;
  std::unordered_map<std::string, VarId> leaves_;
};

std::vector<float> encode_sentence(const ModelConfig& config, const ParameterStore& params,
                                   std::span<const std::int32_t> ids,
                                   std::optional<int> tag = std::nullopt,
                                   std::span<const float> external = {});

std::vector<std::vector<float>> encode_document(const ModelConfig& config,
                                                const ParameterStore& params,
                                                const std::vector<std::vector<float>>& sentences,
                                                ForwardTrace* trace = nullptr);

/// Inference-mode selection probabilities, one per encoded sentence.
std::vector<float> score_sentences(const ModelConfig& config, const ParameterStore& params,
                                   const ScoringInput& input);

/// Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7].
double bce_loss(std::span<const float> probabilities, std::span<const int> labels);

/// Mean over documents of the per-document BCE. When `grads` is non-null it is
/// zeroed and receives the gradient of that mean.
template <typename T>
T loss_and_gradients(const ModelConfig& config, const BasicParameterStore<T>& params,
                     std::span<const ScoringInput> batch, BasicGradientStore<T>* grads,
                     const ForwardOptions& options = {});

}  // namespace msum

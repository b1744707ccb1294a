// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/strategies.hpp"

#include <cmath>

#include <fmt/format.h>

#include "msum/error.hpp"

namespace msum {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::joint: return "joint";
    case Strategy::pretrained: return "pretrained";
    case Strategy::tag: return "tag";
    case Strategy::meta: return "meta";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (auto s : {Strategy::joint, Strategy::pretrained, Strategy::tag, Strategy::meta}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string_view to_string(DomainSchedule s) {
  return s == DomainSchedule::round_robin ? "round_robin" : "proportional";
}

std::optional<DomainSchedule> parse_domain_schedule(std::string_view text) {
  if (text == "round_robin") return DomainSchedule::round_robin;
  if (text == "proportional") return DomainSchedule::proportional;
  return std::nullopt;
}

ModelConfig TrainConfig::resolved_model(std::size_t feature_dim) const {
  ModelConfig m = model;
  m.use_domain_tags = uses_tags();
  m.external_feature_dim = uses_features() ? static_cast<int>(feature_dim) : 0;
  return m;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, "train config: " + msg); };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
  if (inner_step_size && !(*inner_step_size > 0.0)) fail("inner_step_size must be > 0");
  if (!(relabel_prob >= 0.0 && relabel_prob <= 1.0)) fail("relabel_prob must be in [0, 1]");
  if (meta_base == Strategy::meta) fail("meta_base must be joint, tag or pretrained");
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (patience < 0) fail("patience must be >= 0");
  if (eval_k < 1) fail("eval_k must be >= 1");
  if (vocab_min_frequency < 1) fail("vocab_min_frequency must be >= 1");
  if (vocab_max_size < 1) fail("vocab_max_size must be >= 1");
  if (limits.max_sentences < 1 || limits.max_tokens < 1) fail("max_sentences and max_tokens must be >= 1");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) || !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
    fail("adam betas must be in [0, 1)");
  }
  if (uses_features() && features_path.empty()) fail("the pretrained strategy needs features_path");
  ModelConfig m = model;
  m.external_feature_dim = 0;
  m.validate();
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<int> tag_relabel(std::span<const int> ids, double relabel_prob, int unknown_id,
                             std::mt19937_64& rng) {
  if (!(relabel_prob >= 0.0 && relabel_prob <= 1.0)) {
    throw Error(ErrorKind::usage, fmt::format("relabel probability {} is outside [0, 1]", relabel_prob));
  }
  std::vector<int> out(ids.begin(), ids.end());
  for (auto& id : out) {
    if (id == unknown_id) throw Error(ErrorKind::usage, "tag_relabel input already holds the unknown tag");
    if (uniform01(rng) < relabel_prob) id = unknown_id;
  }
  return out;
}

namespace {

void require_batch(Batch batch) {
  if (batch.empty()) throw Error(ErrorKind::usage, "empty batch");
  for (const auto* doc : batch) {
    if (doc == nullptr) throw Error(ErrorKind::usage, "null document in batch");
  }
}

}  // namespace

template <typename T>
T joint_step(const ModelConfig& config, const BasicParameterStore<T>& params, Batch batch,
             BasicGradientStore<T>* grads, const ForwardOptions& options) {
  require_batch(batch);
  std::vector<ScoringInput> inputs;
  inputs.reserve(batch.size());
  for (const auto* doc : batch) inputs.push_back({doc, std::nullopt, {}});
  return loss_and_gradients<T>(config, params, inputs, grads, options);
}

template <typename T>
T tag_step(const ModelConfig& config, const BasicParameterStore<T>& params, Batch batch,
           std::span<const int> tags, BasicGradientStore<T>* grads, const ForwardOptions& options) {
  require_batch(batch);
  if (tags.size() != batch.size()) {
    throw Error(ErrorKind::usage, fmt::format("{} tags for {} documents", tags.size(), batch.size()));
  }
  std::vector<ScoringInput> inputs;
  inputs.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) inputs.push_back({batch[i], tags[i], {}});
  return loss_and_gradients<T>(config, params, inputs, grads, options);
}

template <typename T>
T pretrained_step(const ModelConfig& config, const BasicParameterStore<T>& params, Batch batch,
                  const ExternalFeatures& features, BasicGradientStore<T>* grads,
                  const ForwardOptions& options) {
  require_batch(batch);
  std::vector<ScoringInput> inputs;
  inputs.reserve(batch.size());
  for (const auto* doc : batch) {
    ScoringInput in{doc, std::nullopt, {}};
    for (std::size_t i = 0; i < doc->sentences.size(); ++i) in.features.push_back(features.at(doc->doc_id, i));
    inputs.push_back(std::move(in));
  }
  return loss_and_gradients<T>(config, params, inputs, grads, options);
}

namespace {

template <typename T>
BasicGradientStore<T> hessian_vector(const BasicParameterStore<T>& params, const Objective<T>& f,
                                     const BasicGradientStore<T>& v, double epsilon) {
  double norm2 = 0.0;
  for (const auto& e : v) {
    for (T x : e.tensor.values()) norm2 += static_cast<double>(x) * static_cast<double>(x);
  }
  auto out = params.zeros_like();
  if (norm2 == 0.0) return out;
  const T h = static_cast<T>(epsilon / std::sqrt(norm2));
  auto plus = params;
  plus.axpy(h, v);
  auto minus = params;
  minus.axpy(-h, v);
  auto g_plus = params.zeros_like();
  auto g_minus = params.zeros_like();
  f(plus, &g_plus);
  f(minus, &g_minus);
  out.axpy(T(1) / (T(2) * h), g_plus);
  out.axpy(-T(1) / (T(2) * h), g_minus);
  return out;
}

}  // namespace

template <typename T>
T meta_step(const BasicParameterStore<T>& params, const Objective<T>& main,
            std::span<const Objective<T>> auxiliary, const MetaOptions& options,
            BasicGradientStore<T>* grads, MetaLosses* losses) {
  if (!(options.gamma >= 0.0 && options.gamma <= 1.0)) {
    throw Error(ErrorKind::config, "meta gamma must be in [0, 1]");
  }
  if (!(options.inner_step_size >= 0.0)) throw Error(ErrorKind::config, "meta inner step size must be >= 0");

  if (options.gamma == 1.0) {
    const T loss = main(params, grads);
    if (losses != nullptr) *losses = {static_cast<double>(loss), {}, static_cast<double>(loss)};
    return loss;
  }
  if (auxiliary.empty()) throw Error(ErrorKind::usage, "meta step needs at least one auxiliary batch");

  const T gamma = static_cast<T>(options.gamma);
  const T alpha = static_cast<T>(options.inner_step_size);
  const T weight = (T(1) - gamma) *
                   (options.normalize ? T(1) / static_cast<T>(auxiliary.size()) : T(1));

  auto g_main = params.zeros_like();
  const T main_loss = main(params, &g_main);

  auto adapted = params;
  adapted.axpy(-alpha, g_main);
  for (const auto& e : adapted) {
    if (!e.tensor.all_finite()) {
      throw Error(ErrorKind::numeric, fmt::format("inner meta step made parameter '{}' non-finite", e.name));
    }
  }

  if (grads != nullptr) {
    params.require_same_layout(*grads);
    grads->zero();
    grads->axpy(gamma, g_main);
  }
  T total = gamma * main_loss;
  MetaLosses record;
  record.main = static_cast<double>(main_loss);

  auto g_aux = params.zeros_like();
  for (const auto& aux : auxiliary) {
    const T aux_loss = aux(adapted, grads != nullptr ? &g_aux : nullptr);
    record.auxiliary.push_back(static_cast<double>(aux_loss));
    total += weight * aux_loss;
    if (grads == nullptr) continue;
    if (options.second_order) {
      const auto hv = hessian_vector(params, main, g_aux, options.hvp_epsilon);
      g_aux.axpy(-alpha, hv);
    }
    grads->axpy(weight, g_aux);
  }
  if (grads != nullptr) require_finite_gradients(*grads);
  record.total = static_cast<double>(total);
  if (losses != nullptr) *losses = std::move(record);
  return total;
}

#define MSUM_INSTANTIATE_STEPS(T)                                                                   \
  template T joint_step<T>(const ModelConfig&, const BasicParameterStore<T>&, Batch,              \
                           BasicGradientStore<T>*, const ForwardOptions&);                        \
  template T tag_step<T>(const ModelConfig&, const BasicParameterStore<T>&, Batch,                \
                         std::span<const int>, BasicGradientStore<T>*, const ForwardOptions&);    \
  template T pretrained_step<T>(const ModelConfig&, const BasicParameterStore<T>&, Batch,         \
                                const ExternalFeatures&, BasicGradientStore<T>*,                  \
                                const ForwardOptions&);                                           \
  template T meta_step<T>(const BasicParameterStore<T>&, const Objective<T>&,                     \
                          std::span<const Objective<T>>, const MetaOptions&,                      \
                          BasicGradientStore<T>*, MetaLosses*);

MSUM_INSTANTIATE_STEPS(float)
MSUM_INSTANTIATE_STEPS(double)

#undef MSUM_INSTANTIATE_STEPS

}  // namespace msum

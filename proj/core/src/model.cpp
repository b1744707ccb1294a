// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "msum/error.hpp"

namespace msum {
namespace {

constexpr double kLayerNormEps = 1e-5;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Init { uniform, zeros, ones };

struct ParamSpec {
  std::string name;
  std::vector<std::size_t> shape;
  Init init;
};

std::vector<ParamSpec> layout(const ModelConfig& c, std::size_t vocab_size, std::size_t n_domains) {
  c.validate();
  const auto E = static_cast<std::size_t>(c.embed_dim);
  const auto F = static_cast<std::size_t>(c.conv_filters_per_width);
  const auto C = static_cast<std::size_t>(c.sentence_feature_dim());
  const auto D = static_cast<std::size_t>(c.model_dim);
  const auto H = static_cast<std::size_t>(c.ffn_dim);
  const auto Tg = static_cast<std::size_t>(c.tag_embed_dim);

  std::vector<ParamSpec> specs;
  if (c.external_feature_dim > 0) {
    specs.push_back({"feature_proj.weight", {static_cast<std::size_t>(c.external_feature_dim), C}, Init::uniform});
    specs.push_back({"feature_proj.bias", {C}, Init::zeros});
  } else {
    specs.push_back({"embedding", {vocab_size, E}, Init::uniform});
    for (int w : c.conv_filter_widths) {
      const auto uw = static_cast<std::size_t>(w);
      specs.push_back({fmt::format("conv.w{}.weight", w), {uw * E, F}, Init::uniform});
      specs.push_back({fmt::format("conv.w{}.bias", w), {F}, Init::zeros});
    }
  }
  std::size_t proj_in = C;
  if (c.use_domain_tags) {
    specs.push_back({"tag_embedding", {n_domains + 1, Tg}, Init::uniform});
    proj_in += Tg;
  }
  specs.push_back({"sentence_proj.weight", {proj_in, D}, Init::uniform});
  specs.push_back({"sentence_proj.bias", {D}, Init::zeros});
  for (const char* p : {"query", "key", "value", "output"}) {
    specs.push_back({fmt::format("attention.{}.weight", p), {D, D}, Init::uniform});
    specs.push_back({fmt::format("attention.{}.bias", p), {D}, Init::zeros});
  }
  specs.push_back({"attention_norm.gain", {D}, Init::ones});
  specs.push_back({"attention_norm.bias", {D}, Init::zeros});
  specs.push_back({"ffn.hidden.weight", {D, H}, Init::uniform});
  specs.push_back({"ffn.hidden.bias", {H}, Init::zeros});
  specs.push_back({"ffn.output.weight", {H, D}, Init::uniform});
  specs.push_back({"ffn.output.bias", {D}, Init::zeros});
  specs.push_back({"ffn_norm.gain", {D}, Init::ones});
  specs.push_back({"ffn_norm.bias", {D}, Init::zeros});
  specs.push_back({"classifier.weight", {D, 1}, Init::zeros});
  specs.push_back({"classifier.bias", {1}, Init::zeros});
  return specs;
}

template <typename T>
BasicTensor<T> positional_encoding(std::size_t n, std::size_t d) {
  auto pe = BasicTensor<T>::matrix(n, d);
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t i = 0; i < d; ++i) {
      const double angle =
          static_cast<double>(pos) / std::pow(10000.0, static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      pe(pos, i) = static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

}  // namespace

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw Error(ErrorKind::config, fmt::format("model config: {} must be >= 1", name));
  };
  positive(embed_dim, "embed_dim");
  positive(conv_filters_per_width, "conv_filters_per_width");
  positive(model_dim, "model_dim");
  positive(attention_heads, "attention_heads");
  positive(ffn_dim, "ffn_dim");
  positive(tag_embed_dim, "tag_embed_dim");
  if (conv_filter_widths.empty()) throw Error(ErrorKind::config, "model config: conv_filter_widths is empty");
  for (int w : conv_filter_widths) positive(w, "conv filter width");
  if (model_dim % attention_heads != 0) {
    throw Error(ErrorKind::config, "model config: model_dim must be divisible by attention_heads");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw Error(ErrorKind::config, "model config: dropout_rate must be in [0, 1)");
  }
  if (external_feature_dim < 0) throw Error(ErrorKind::config, "model config: external_feature_dim < 0");
}

int ModelConfig::sentence_feature_dim() const {
  return conv_filters_per_width * static_cast<int>(conv_filter_widths.size());
}

ParameterStore init_params(const ModelConfig& config, std::size_t vocab_size, std::size_t n_domains,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uniform(-0.1f, 0.1f);
  ParameterStore store;
  store.set_seed(seed);
  for (auto& spec : layout(config, vocab_size, n_domains)) {
    Tensor t(spec.shape);
    switch (spec.init) {
      case Init::uniform:
        for (auto& v : t.values()) v = uniform(rng);
        break;
      case Init::ones: t.fill(1.0f); break;
      case Init::zeros: break;
    }
    store.add(std::move(spec.name), std::move(t));
  }
  return store;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> expected_layout(
    const ModelConfig& config, std::size_t vocab_size, std::size_t n_domains) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  for (auto& spec : layout(config, vocab_size, n_domains)) out.emplace_back(spec.name, spec.shape);
  return out;
}

template <typename T>
ScorerGraph<T>::ScorerGraph(const ModelConfig& config, const BasicParameterStore<T>& params,
                            BasicGradientStore<T>* grads, Tape<T>& tape, ForwardOptions options)
    : config_(config),
      params_(params),
      grads_(grads),
      tape_(tape),
      options_(options),
      dropout_state_(options.dropout_seed) {}

template <typename T>
VarId ScorerGraph<T>::param(const std::string& name) {
  if (auto it = leaves_.find(name); it != leaves_.end()) return it->second;
  const auto& value = params_.at(name);
  BasicTensor<T>* sink = grads_ != nullptr ? &grads_->at(name) : nullptr;
  VarId v = tape_.parameter(value, sink);
  leaves_.emplace(name, v);
  return v;
}

template <typename T>
VarId ScorerGraph<T>::dropout(VarId x) {
  const double rate = config_.dropout_rate;
  if (!options_.training || rate <= 0.0) return x;
  BasicTensor<T> mask(tape_.value(x).shape());
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& m : mask.values()) {
    const double u = static_cast<double>(splitmix64(dropout_state_) >> 11) * 0x1.0p-53;
    m = u < rate ? T(0) : keep_scale;
  }
  return ag::mul_const(tape_, x, std::move(mask));
}

template <typename T>
VarId ScorerGraph<T>::sentence(std::span<const std::int32_t> ids, std::optional<int> tag,
                               std::span<const float> external) {
  VarId features;
  if (config_.external_feature_dim > 0) {
    if (external.size() != static_cast<std::size_t>(config_.external_feature_dim)) {
      throw Error(ErrorKind::input, fmt::format("external feature has {} entries, model expects {}",
                                                external.size(), config_.external_feature_dim));
    }
    auto x = BasicTensor<T>::matrix(1, external.size());
    for (std::size_t i = 0; i < external.size(); ++i) x[i] = static_cast<T>(external[i]);
    VarId in = tape_.constant(std::move(x));
    features = ag::relu(tape_, ag::linear(tape_, in, param("feature_proj.weight"), param("feature_proj.bias")));
  } else {
    if (!external.empty()) {
      throw Error(ErrorKind::input, "external feature given to a model without a feature projection");
    }
    if (ids.empty()) throw Error(ErrorKind::input, "cannot encode an empty sentence");
    const auto max_width = static_cast<std::size_t>(
        *std::max_element(config_.conv_filter_widths.begin(), config_.conv_filter_widths.end()));
    std::vector<std::int32_t> padded(ids.begin(), ids.end());
    if (padded.size() < max_width) padded.resize(max_width, Vocabulary::kPad);
    VarId emb = ag::gather_rows(tape_, param("embedding"), std::span<const std::int32_t>(padded));
    std::vector<VarId> pooled;
    for (int w : config_.conv_filter_widths) {
      VarId conv = ag::conv1d(tape_, emb, param(fmt::format("conv.w{}.weight", w)),
                              param(fmt::format("conv.w{}.bias", w)), static_cast<std::size_t>(w));
      pooled.push_back(ag::max_rows(tape_, ag::relu(tape_, conv)));
    }
    features = pooled.size() == 1 ? pooled.front() : ag::concat_cols(tape_, std::span<const VarId>(pooled));
  }

  if (config_.use_domain_tags) {
    if (!tag) throw Error(ErrorKind::usage, "tag-aware model requires a domain tag");
    VarId table = param("tag_embedding");
    const auto rows = tape_.value(table).rows();
    if (*tag < 0 || static_cast<std::size_t>(*tag) >= rows) {
      throw Error(ErrorKind::input, fmt::format("tag id {} out of table range [0, {})", *tag, rows));
    }
    const std::int32_t tag_id = *tag;
    VarId tag_vec = ag::gather_rows(tape_, table, std::span<const std::int32_t>(&tag_id, 1));
    const VarId parts[] = {features, tag_vec};
    features = ag::concat_cols(tape_, std::span<const VarId>(parts));
  } else if (tag) {
    throw Error(ErrorKind::usage, "domain tag given to a model without a tag table");
  }

  VarId projected = ag::linear(tape_, features, param("sentence_proj.weight"), param("sentence_proj.bias"));
  return dropout(projected);
}

template <typename T>
VarId ScorerGraph<T>::document(std::span<const VarId> sentences) {
  if (sentences.empty()) throw Error(ErrorKind::input, "cannot encode a document without sentences");
  const auto n = sentences.size();
  const auto d = static_cast<std::size_t>(config_.model_dim);
  VarId x = sentences.size() == 1 ? sentences.front() : ag::concat_rows(tape_, sentences);
  if (config_.use_positional_encoding) {
    x = ag::add(tape_, x, tape_.constant(positional_encoding<T>(n, d)));
  }

  VarId q = ag::linear(tape_, x, param("attention.query.weight"), param("attention.query.bias"));
  VarId k = ag::linear(tape_, x, param("attention.key.weight"), param("attention.key.bias"));
  VarId v = ag::linear(tape_, x, param("attention.value.weight"), param("attention.value.bias"));
  const auto heads = static_cast<std::size_t>(config_.attention_heads);
  const std::size_t dh = d / heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
  std::vector<VarId> head_out;
  if (options_.trace != nullptr) {
    options_.trace->attention.clear();
    options_.trace->sentences = n;
  }
  for (std::size_t h = 0; h < heads; ++h) {
    VarId qh = heads == 1 ? q : ag::slice_cols(tape_, q, h * dh, dh);
    VarId kh = heads == 1 ? k : ag::slice_cols(tape_, k, h * dh, dh);
    VarId vh = heads == 1 ? v : ag::slice_cols(tape_, v, h * dh, dh);
    VarId weights = ag::softmax_rows(tape_, ag::scale(tape_, ag::matmul_nt(tape_, qh, kh), inv_sqrt));
    if (options_.trace != nullptr) {
      const auto& w = tape_.value(weights);
      options_.trace->attention.emplace_back(w.values().begin(), w.values().end());
    }
    head_out.push_back(ag::matmul(tape_, weights, vh));
  }
  VarId merged = heads == 1 ? head_out.front() : ag::concat_cols(tape_, std::span<const VarId>(head_out));
  VarId attn = ag::linear(tape_, merged, param("attention.output.weight"), param("attention.output.bias"));
  const T eps = static_cast<T>(kLayerNormEps);
  VarId h1 = ag::layer_norm_rows(tape_, ag::add(tape_, x, dropout(attn)), param("attention_norm.gain"),
                                 param("attention_norm.bias"), eps);
  VarId hidden = ag::relu(tape_, ag::linear(tape_, h1, param("ffn.hidden.weight"), param("ffn.hidden.bias")));
  VarId ffn = ag::linear(tape_, hidden, param("ffn.output.weight"), param("ffn.output.bias"));
  return ag::layer_norm_rows(tape_, ag::add(tape_, h1, dropout(ffn)), param("ffn_norm.gain"),
                             param("ffn_norm.bias"), eps);
}

template <typename T>
VarId ScorerGraph<T>::probabilities(VarId contextual) {
  VarId logits = ag::linear(tape_, contextual, param("classifier.weight"), param("classifier.bias"));
  return ag::sigmoid(tape_, logits);
}

template <typename T>
VarId ScorerGraph<T>::score(const ScoringInput& input) {
  if (input.doc == nullptr) throw Error(ErrorKind::usage, "scoring input without a document");
  const auto& doc = *input.doc;
  const bool external = config_.external_feature_dim > 0;
  if (external && input.features.size() != doc.sentences.size()) {
    throw Error(ErrorKind::input, fmt::format("document '{}' has {} feature vectors for {} sentences",
                                              doc.doc_id, input.features.size(), doc.sentences.size()));
  }
  std::vector<VarId> sentences;
  sentences.reserve(doc.sentences.size());
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    sentences.push_back(sentence(doc.sentences[i], input.tag,
                                 external ? input.features[i] : std::span<const float>{}));
  }
  return probabilities(document(sentences));
}

template class ScorerGraph<float>;
template class ScorerGraph<double>;

std::vector<float> encode_sentence(const ModelConfig& config, const ParameterStore& params,
                                   std::span<const std::int32_t> ids, std::optional<int> tag,
                                   std::span<const float> external) {
  Tape<float> tape;
  ScorerGraph<float> graph(config, params, nullptr, tape);
  const auto& v = tape.value(graph.sentence(ids, tag, external));
  return {v.values().begin(), v.values().end()};
}

std::vector<std::vector<float>> encode_document(const ModelConfig& config, const ParameterStore& params,
                                                const std::vector<std::vector<float>>& sentences,
                                                ForwardTrace* trace) {
  const auto d = static_cast<std::size_t>(config.model_dim);
  Tape<float> tape;
  ForwardOptions options;
  options.trace = trace;
  ScorerGraph<float> graph(config, params, nullptr, tape, options);
  std::vector<VarId> rows;
  for (const auto& s : sentences) {
    if (s.size() != d) throw Error(ErrorKind::input, "sentence vector width differs from model_dim");
    rows.push_back(tape.constant(Tensor({1, d}, s)));
  }
  const auto& out = tape.value(graph.document(rows));
  std::vector<std::vector<float>> result;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    result.emplace_back(out.data() + i * d, out.data() + (i + 1) * d);
  }
  return result;
}

std::vector<float> score_sentences(const ModelConfig& config, const ParameterStore& params,
                                   const ScoringInput& input) {
  Tape<float> tape;
  ScorerGraph<float> graph(config, params, nullptr, tape);
  const auto& p = tape.value(graph.score(input));
  return {p.values().begin(), p.values().end()};
}

double bce_loss(std::span<const float> probabilities, std::span<const int> labels) {
  if (probabilities.size() != labels.size()) {
    throw Error(ErrorKind::usage, fmt::format("bce_loss: {} probabilities for {} labels",
                                              probabilities.size(), labels.size()));
  }
  if (labels.empty()) throw Error(ErrorKind::usage, "bce_loss: empty input");
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(static_cast<double>(probabilities[i]), kProbabilityClamp, 1.0 - kProbabilityClamp);
    loss -= labels[i] != 0 ? std::log(p) : std::log(1.0 - p);
  }
  return loss / static_cast<double>(labels.size());
}

template <typename T>
T loss_and_gradients(const ModelConfig& config, const BasicParameterStore<T>& params,
                     std::span<const ScoringInput> batch, BasicGradientStore<T>* grads,
                     const ForwardOptions& options) {
  if (batch.empty()) throw Error(ErrorKind::usage, "empty batch");
  if (grads != nullptr) {
    params.require_same_layout(*grads);
    grads->zero();
  }
  const T inv_batch = T(1) / static_cast<T>(batch.size());
  T total = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& item = batch[i];
    if (item.doc == nullptr || item.doc->labels.size() != item.doc->sentences.size()) {
      throw Error(ErrorKind::input,
                  fmt::format("document '{}' has no labels for its sentences",
                              item.doc != nullptr ? item.doc->doc_id : std::string("?")));
    }
    Tape<T> tape;
    ForwardOptions doc_options = options;
    std::uint64_t mix = options.dropout_seed ^ (0x5851f42d4c957f2dULL * (i + 1));
    doc_options.dropout_seed = splitmix64(mix);
    doc_options.trace = nullptr;
    ScorerGraph<T> graph(config, params, grads, tape, doc_options);
    VarId probs = graph.score(item);
    std::vector<T> labels(item.doc->labels.begin(), item.doc->labels.end());
    VarId loss = ag::bce_mean(tape, probs, std::span<const T>(labels));
    total += tape.value(loss)[0];
    if (grads != nullptr) tape.backward(loss, inv_batch);
  }
  if (grads != nullptr) require_finite_gradients(*grads);
  return total * inv_batch;
}

template float loss_and_gradients<float>(const ModelConfig&, const BasicParameterStore<float>&,
                                         std::span<const ScoringInput>, BasicGradientStore<float>*,
                                         const ForwardOptions&);
template double loss_and_gradients<double>(const ModelConfig&, const BasicParameterStore<double>&,
                                           std::span<const ScoringInput>, BasicGradientStore<double>*,
                                           const ForwardOptions&);

}  // namespace msum

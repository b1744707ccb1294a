// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "msum/corpus.hpp"
#include "msum/labeling.hpp"
#include "msum/model.hpp"

namespace msum::testing {

inline Document make_doc(const std::vector<std::string>& sentences, const std::vector<std::string>& reference,
                         std::string id = "d0", int domain = 0, Split split = Split::test) {
  Document d;
  d.doc_id = std::move(id);
  d.domain = domain;
  d.split = split;
  for (const auto& s : sentences) d.sentences.push_back(Sentence::from_raw(s));
  for (const auto& s : reference) d.reference.push_back(Sentence::from_raw(s));
  return d;
}

/// Attaches greedy oracle labels to every document.
inline Corpus label_all(const Corpus& corpus) {
  std::vector<std::vector<int>> labels;
  for (const auto& d : corpus.documents()) labels.push_back(greedy_oracle(d).labels);
  return corpus.with_labels(std::move(labels));
}

/// Small scorer used by model and strategy tests.
inline ModelConfig tiny_model() {
  ModelConfig c;
  c.embed_dim = 6;
  c.conv_filter_widths = {1, 2};
  c.conv_filters_per_width = 3;
  c.model_dim = 8;
  c.attention_heads = 2;
  c.ffn_dim = 10;
  c.tag_embed_dim = 4;
  c.dropout_rate = 0.0;
  return c;
}

/// Overwrites every parameter with Uniform(-scale, scale) draws.
template <typename Store>
void randomize(Store& params, std::uint64_t seed, double scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& e : params) {
    for (auto& v : e.tensor.values()) v = static_cast<typename std::decay_t<decltype(v)>>(u(rng));
  }
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("msum_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace msum::testing

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "msum/corpus.hpp"

namespace msum {

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr int kDefaultMinFrequency = 2;
  static constexpr std::size_t kDefaultMaxSize = 30000;

  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}
  /// `tokens` excludes the reserved PAD/UNK entries; ids start at 2.
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Counts tokens of source-domain train documents (sentences and
  /// references), drops those below `min_frequency`, orders by
  /// (frequency desc, token asc) and keeps the first `max_size`.
  static Vocabulary build(const Corpus& corpus, int min_frequency = kDefaultMinFrequency,
                          std::size_t max_size = kDefaultMaxSize);

  std::int32_t id(std::string_view token) const;
  const std::string& token(std::int32_t id) const;
  /// Size including PAD and UNK.
  std::size_t size() const { return tokens_.size(); }
  /// Real tokens in id order, without PAD/UNK.
  std::vector<std::string> real_tokens() const;

  std::vector<std::int32_t> encode(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

struct EncodingLimits {
  std::size_t max_sentences = 50;
  std::size_t max_tokens = 100;
};

struct EncodedDocument {
  std::string doc_id;
  int domain = 0;
  std::vector<std::vector<std::int32_t>> sentences;
  /// Labels for the retained sentences; empty when the document is unlabeled.
  std::vector<int> labels;
};

EncodedDocument encode_document(const Document& doc, const Vocabulary& vocab,
                                const EncodingLimits& limits = {});

}  // namespace msum

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/vocabulary.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <fmt/format.h>

#include "msum/error.hpp"

namespace msum {

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  tokens_.reserve(tokens.size() + 2);
  tokens_.emplace_back("<pad>");
  tokens_.emplace_back("<unk>");
  for (auto& t : tokens) {
    if (ids_.count(t) != 0) {
      throw Error(ErrorKind::format, fmt::format("duplicate vocabulary token '{}'", t));
    }
    ids_.emplace(t, static_cast<std::int32_t>(tokens_.size()));
    tokens_.push_back(std::move(t));
  }
}

Vocabulary Vocabulary::build(const Corpus& corpus, int min_frequency, std::size_t max_size) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  auto add = [&](const std::vector<Sentence>& sentences) {
    for (const auto& s : sentences) {
      for (const auto& t : s.tokens) {
        ++counts[t];
        ++total;
      }
    }
  };
  for (const auto& doc : corpus.documents()) {
    if (doc.split != Split::train || !corpus.is_source(doc.domain)) continue;
    add(doc.sentences);
    add(doc.reference);
  }
  if (total == 0) {
    throw Error(ErrorKind::input, "no source-domain training text to build a vocabulary from");
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= static_cast<std::size_t>(std::max(min_frequency, 0))) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (kept.size() > max_size) kept.resize(max_size);

  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [token, count] : kept) tokens.push_back(std::move(token));
  return Vocabulary(std::move(tokens));
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorKind::usage, fmt::format("vocabulary id {} out of range", id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> Vocabulary::real_tokens() const {
  return {tokens_.begin() + 2, tokens_.end()};
}

std::vector<std::int32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::int32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

EncodedDocument encode_document(const Document& doc, const Vocabulary& vocab,
                                const EncodingLimits& limits) {
  EncodedDocument out;
  out.doc_id = doc.doc_id;
  out.domain = doc.domain;
  const std::size_t n = std::min(doc.sentences.size(), limits.max_sentences);
  out.sentences.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tokens = doc.sentences[i].tokens;
    std::vector<std::int32_t> ids;
    const std::size_t len = std::min(tokens.size(), limits.max_tokens);
    ids.reserve(len);
    for (std::size_t j = 0; j < len; ++j) ids.push_back(vocab.id(tokens[j]));
    out.sentences.push_back(std::move(ids));
  }
  if (doc.labels) out.labels.assign(doc.labels->begin(), doc.labels->begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace msum

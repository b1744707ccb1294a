// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace msum {

/// Fixed per-sentence vectors from an external encoder, keyed by
/// (doc_id, sentence index). Read-only once loaded.
///
/// File format: one JSON object per line,
///   {"doc_id": "...", "features": [[f, f, ...], ...]}
/// with one inner list per sentence, all of the same width.
class ExternalFeatures {
 public:
  ExternalFeatures() = default;
  explicit ExternalFeatures(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t documents() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  void add(const std::string& doc_id, std::vector<std::vector<float>> sentences);
  bool contains(const std::string& doc_id, std::size_t index) const;
  /// Throws an input error naming (doc_id, index) when absent.
  std::span<const float> at(const std::string& doc_id, std::size_t index) const;

  static ExternalFeatures read(std::istream& in, const std::string& source = "<stream>");
  static ExternalFeatures load(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<std::vector<float>>> docs_;
};

}  // namespace msum

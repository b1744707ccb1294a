// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace msum {

enum class Split { train, valid, test };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

/// Reserved name of the unknown-domain tag. Ingestion rejects documents that
/// use it as their domain.
inline constexpr std::string_view kUnknownDomainName = "__unknown__";

struct DomainId {
  int id = 0;
  std::string name;
  bool is_unknown_tag = false;
};

/// Dense registry of domains. Real domains occupy ids 0..K-1 in first-seen
/// order; the unknown tag is always id K.
class DomainRegistry {
 public:
  DomainRegistry() : DomainRegistry(std::vector<std::string>{}) {}
  explicit DomainRegistry(const std::vector<std::string>& names);

  /// Number of real domains (K), excluding the unknown tag.
  std::size_t size() const { return entries_.size() - 1; }
  int unknown_id() const { return static_cast<int>(entries_.size()) - 1; }

  const DomainId& at(int id) const;
  const DomainId& unknown() const { return entries_.back(); }
  std::optional<int> find(std::string_view name) const;
  std::span<const DomainId> real_domains() const {
    return {entries_.data(), entries_.size() - 1};
  }
  std::vector<std::string> names() const;

 private:
  std::vector<DomainId> entries_;
  std::unordered_map<std::string, int> by_name_;
};

struct Sentence {
  std::string raw;
  std::vector<std::string> tokens;

  static Sentence from_raw(std::string raw);
};

struct Document {
  std::string doc_id;
  int domain = 0;
  std::vector<Sentence> sentences;
  std::vector<Sentence> reference;
  Split split = Split::train;
  /// Extractive labels, one per sentence, present after the `label` step.
  std::optional<std::vector<int>> labels;

  std::vector<std::string> flat_reference() const;
};

/// Names of source (training) and held-out (unseen) domains. When both lists
/// are empty every ingested domain is treated as a source domain.
struct DomainPartition {
  std::vector<std::string> source;
  std::vector<std::string> heldout;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(DomainRegistry domains, std::vector<Document> documents,
         const DomainPartition& partition);

  const DomainRegistry& domains() const { return domains_; }
  std::span<const Document> documents() const { return documents_; }
  const std::vector<int>& source_domains() const { return source_; }
  const std::vector<int>& heldout_domains() const { return heldout_; }
  bool is_source(int domain) const;
  bool is_heldout(int domain) const;
  DomainPartition partition() const;

  std::vector<const Document*> select(int domain, Split split) const;
  SplitCounts counts(int domain) const;

  /// True when every document carries a label vector.
  bool is_labeled() const;
  /// True when every train/valid document of a source domain is labeled.
  bool source_labeled() const;

  /// Copy of this corpus with labels attached, in document order.
  Corpus with_labels(std::vector<std::vector<int>> labels) const;
  /// Copy of this corpus with a different source/held-out partition.
  Corpus with_partition(const DomainPartition& partition) const;

 private:
  DomainRegistry domains_;
  std::vector<Document> documents_;
  std::vector<int> source_;
  std::vector<int> heldout_;
};

/// Parses line-delimited JSON records:
///   {"doc_id": str, "domain": str, "split": "train"|"valid"|"test",
///    "text": [str, ...], "summary": [str, ...], "labels": [int, ...]?}
/// `source_name` is used in error messages.
Corpus parse_corpus(std::istream& in, const DomainPartition& partition,
                    std::string_view source_name = "<stream>");
Corpus ingest(const std::filesystem::path& path, const DomainPartition& partition);

void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Corpus bundle: a directory holding `corpus.jsonl` and `partition.json`.
void write_bundle(const std::filesystem::path& dir, const Corpus& corpus);
/// Loads a bundle directory, or a bare corpus file with `fallback` partition.
Corpus load_bundle(const std::filesystem::path& path,
                   const DomainPartition& fallback = {});

}  // namespace msum

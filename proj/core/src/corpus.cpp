// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "msum/error.hpp"
#include "msum/tokenize.hpp"

namespace msum {

using json = nlohmann::ordered_json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "valid") return Split::valid;
  if (text == "test") return Split::test;
  return std::nullopt;
}

DomainRegistry::DomainRegistry(const std::vector<std::string>& names) {
  for (const auto& name : names) {
    if (name == kUnknownDomainName) {
      throw Error(ErrorKind::config, fmt::format("domain name '{}' is reserved", name));
    }
    if (!by_name_.emplace(name, static_cast<int>(entries_.size())).second) {
      throw Error(ErrorKind::config, fmt::format("duplicate domain name '{}'", name));
    }
    entries_.push_back({static_cast<int>(entries_.size()), name, false});
  }
  entries_.push_back({static_cast<int>(entries_.size()), std::string(kUnknownDomainName), true});
}

const DomainId& DomainRegistry::at(int id) const {
  if (id < 0 || id >= static_cast<int>(entries_.size())) {
    throw Error(ErrorKind::usage, fmt::format("domain id {} out of range", id));
  }
  return entries_[static_cast<std::size_t>(id)];
}

std::optional<int> DomainRegistry::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> DomainRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& d : real_domains()) out.push_back(d.name);
  return out;
}

Sentence Sentence::from_raw(std::string raw) {
  Sentence s;
  s.tokens = tokenize(raw);
  s.raw = std::move(raw);
  return s;
}

std::vector<std::string> Document::flat_reference() const {
  std::vector<std::string> out;
  for (const auto& s : reference) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

Corpus::Corpus(DomainRegistry domains, std::vector<Document> documents,
               const DomainPartition& partition)
    : domains_(std::move(domains)), documents_(std::move(documents)) {
  std::unordered_set<std::string> ids;
  for (const auto& doc : documents_) {
    if (doc.domain < 0 || doc.domain >= static_cast<int>(domains_.size())) {
      throw Error(ErrorKind::input, fmt::format("document '{}' has unregistered domain", doc.doc_id));
    }
    if (!ids.insert(doc.doc_id).second) {
      throw Error(ErrorKind::input, fmt::format("duplicate doc_id '{}'", doc.doc_id));
    }
  }

  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<int> out;
    for (const auto& name : names) {
      auto id = domains_.find(name);
      if (!id) {
        throw Error(ErrorKind::config,
                    fmt::format("partition names unknown domain '{}'", name));
      }
      if (std::find(out.begin(), out.end(), *id) == out.end()) out.push_back(*id);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  source_ = resolve(partition.source);
  heldout_ = resolve(partition.heldout);
  for (int id : source_) {
    if (std::binary_search(heldout_.begin(), heldout_.end(), id)) {
      throw Error(ErrorKind::config,
                  fmt::format("domain '{}' is in both source and heldout partitions",
                              domains_.at(id).name));
    }
  }
  if (partition.source.empty() && partition.heldout.empty()) {
    for (const auto& d : domains_.real_domains()) source_.push_back(d.id);
  }
}

bool Corpus::is_source(int domain) const {
  return std::binary_search(source_.begin(), source_.end(), domain);
}

bool Corpus::is_heldout(int domain) const {
  return std::binary_search(heldout_.begin(), heldout_.end(), domain);
}

DomainPartition Corpus::partition() const {
  DomainPartition p;
  for (int id : source_) p.source.push_back(domains_.at(id).name);
  for (int id : heldout_) p.heldout.push_back(domains_.at(id).name);
  return p;
}

std::vector<const Document*> Corpus::select(int domain, Split split) const {
  std::vector<const Document*> out;
  for (const auto& doc : documents_) {
    if (doc.domain == domain && doc.split == split) out.push_back(&doc);
  }
  return out;
}

SplitCounts Corpus::counts(int domain) const {
  SplitCounts c;
  for (const auto& doc : documents_) {
    if (doc.domain != domain) continue;
    switch (doc.split) {
      case Split::train: ++c.train; break;
      case Split::valid: ++c.valid; break;
      case Split::test: ++c.test; break;
    }
  }
  return c;
}

bool Corpus::is_labeled() const {
  return std::all_of(documents_.begin(), documents_.end(),
                     [](const Document& d) { return d.labels.has_value(); });
}

bool Corpus::source_labeled() const {
  return std::all_of(documents_.begin(), documents_.end(), [&](const Document& d) {
    return !is_source(d.domain) || d.split == Split::test || d.labels.has_value();
  });
}

Corpus Corpus::with_labels(std::vector<std::vector<int>> labels) const {
  if (labels.size() != documents_.size()) {
    throw Error(ErrorKind::usage, "label count does not match document count");
  }
  Corpus out = *this;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != out.documents_[i].sentences.size()) {
      throw Error(ErrorKind::usage,
                  fmt::format("labels for '{}' do not match its sentence count",
                              out.documents_[i].doc_id));
    }
    out.documents_[i].labels = std::move(labels[i]);
  }
  return out;
}

Corpus Corpus::with_partition(const DomainPartition& partition) const {
  return Corpus(domains_, documents_, partition);
}

namespace {

std::vector<Sentence> read_sentences(const json& record, const char* field, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw Error(ErrorKind::input, fmt::format("line {}: missing \"{}\" field", line, field));
  }
  if (!it->is_array()) {
    throw Error(ErrorKind::input,
                fmt::format("line {}: \"{}\" must be a list of sentence strings", line, field));
  }
  std::vector<Sentence> out;
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw Error(ErrorKind::input,
                  fmt::format("line {}: \"{}\" must be a list of sentence strings", line, field));
    }
    Sentence s = Sentence::from_raw(item.get<std::string>());
    if (!s.tokens.empty()) out.push_back(std::move(s));
  }
  if (out.empty()) {
    throw Error(ErrorKind::input, fmt::format("line {}: \"{}\" has no non-empty sentence", line, field));
  }
  return out;
}

std::string read_string(const json& record, const char* field, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw Error(ErrorKind::input, fmt::format("line {}: missing \"{}\" field", line, field));
  }
  if (!it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorKind::input,
                fmt::format("line {}: \"{}\" must be a non-empty string", line, field));
  }
  return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in, const DomainPartition& partition,
                    std::string_view source_name) {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  std::vector<Document> docs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::input,
                  fmt::format("{}: line {}: malformed record ({})", source_name, line, e.what()));
    }
    if (!record.is_object()) {
      throw Error(ErrorKind::input, fmt::format("{}: line {}: record is not an object", source_name, line));
    }
    try {
      Document doc;
      doc.doc_id = read_string(record, "doc_id", line);
      const std::string domain = read_string(record, "domain", line);
      const std::string split = read_string(record, "split", line);
      auto parsed = parse_split(split);
      if (!parsed) {
        throw Error(ErrorKind::input,
                    fmt::format("line {}: unknown split '{}' (expected train, valid or test)", line, split));
      }
      doc.split = *parsed;
      if (domain == kUnknownDomainName) {
        throw Error(ErrorKind::input, fmt::format("line {}: domain name '{}' is reserved", line, domain));
      }
      auto [it, inserted] = ids.emplace(domain, static_cast<int>(names.size()));
      if (inserted) names.push_back(domain);
      doc.domain = it->second;
      doc.sentences = read_sentences(record, "text", line);
      doc.reference = read_sentences(record, "summary", line);
      if (auto lit = record.find("labels"); lit != record.end()) {
        if (!lit->is_array()) {
          throw Error(ErrorKind::input, fmt::format("line {}: \"labels\" must be a list", line));
        }
        std::vector<int> labels;
        for (const auto& v : *lit) {
          if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
            throw Error(ErrorKind::input, fmt::format("line {}: labels must be 0 or 1", line));
          }
          labels.push_back(v.get<int>());
        }
        if (labels.size() != doc.sentences.size()) {
          throw Error(ErrorKind::input,
                      fmt::format("line {}: {} labels for {} sentences", line, labels.size(),
                                  doc.sentences.size()));
        }
        doc.labels = std::move(labels);
      }
      docs.push_back(std::move(doc));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}: {}", source_name, e.what()));
    }
  }
  return Corpus(DomainRegistry(names), std::move(docs), partition);
}

Corpus ingest(const std::filesystem::path& path, const DomainPartition& partition) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::input, fmt::format("cannot open corpus file '{}'", path.string()));
  }
  return parse_corpus(in, partition, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents()) {
    json record;
    record["doc_id"] = doc.doc_id;
    record["domain"] = corpus.domains().at(doc.domain).name;
    record["split"] = std::string(to_string(doc.split));
    json text = json::array();
    for (const auto& s : doc.sentences) text.push_back(s.raw);
    json summary = json::array();
    for (const auto& s : doc.reference) summary.push_back(s.raw);
    record["text"] = std::move(text);
    record["summary"] = std::move(summary);
    if (doc.labels) record["labels"] = *doc.labels;
    out << record.dump() << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::input, fmt::format("cannot write '{}'", path.string()));
  write_corpus(out, corpus);
}

void write_bundle(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir);
  write_corpus(dir / "corpus.jsonl", corpus);
  const DomainPartition p = corpus.partition();
  json part;
  part["source"] = p.source;
  part["heldout"] = p.heldout;
  std::ofstream out(dir / "partition.json", std::ios::binary);
  out << part.dump(2) << '\n';
}

Corpus load_bundle(const std::filesystem::path& path, const DomainPartition& fallback) {
  if (!std::filesystem::is_directory(path)) return ingest(path, fallback);

  DomainPartition partition = fallback;
  const auto part_path = path / "partition.json";
  if (std::filesystem::exists(part_path)) {
    std::ifstream in(part_path);
    try {
      const json part = json::parse(in);
      partition.source = part.at("source").get<std::vector<std::string>>();
      partition.heldout = part.at("heldout").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::format,
                  fmt::format("'{}' is not a valid partition file: {}", part_path.string(), e.what()));
    }
  }
  return ingest(path / "corpus.jsonl", partition);
}

}  // namespace msum

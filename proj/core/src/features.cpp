// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/features.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "msum/error.hpp"

namespace msum {

void ExternalFeatures::add(const std::string& doc_id, std::vector<std::vector<float>> sentences) {
  if (docs_.count(doc_id) != 0) {
    throw Error(ErrorKind::input, fmt::format("duplicate feature entry for document '{}'", doc_id));
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (dim_ == 0) dim_ = sentences[i].size();
    if (sentences[i].size() != dim_ || dim_ == 0) {
      throw Error(ErrorKind::input,
                  fmt::format("feature ({}, {}) has {} entries, expected {}", doc_id, i,
                              sentences[i].size(), dim_));
    }
    for (float v : sentences[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::input, fmt::format("feature ({}, {}) is not finite", doc_id, i));
      }
    }
  }
  docs_.emplace(doc_id, std::move(sentences));
}

bool ExternalFeatures::contains(const std::string& doc_id, std::size_t index) const {
  auto it = docs_.find(doc_id);
  return it != docs_.end() && index < it->second.size();
}

std::span<const float> ExternalFeatures::at(const std::string& doc_id, std::size_t index) const {
  auto it = docs_.find(doc_id);
  if (it == docs_.end() || index >= it->second.size()) {
    throw Error(ErrorKind::input, fmt::format("missing external feature for ({}, {})", doc_id, index));
  }
  return it->second[index];
}

ExternalFeatures ExternalFeatures::read(std::istream& in, const std::string& source) {
  ExternalFeatures out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.add(j.at("doc_id").get<std::string>(),
              j.at("features").get<std::vector<std::vector<float>>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::input, fmt::format("{}:{}: malformed feature record: {}", source, line_no, e.what()));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return out;
}

ExternalFeatures ExternalFeatures::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, fmt::format("cannot open feature file '{}'", path.string()));
  return read(in, path.string());
}

void ExternalFeatures::write(std::ostream& out) const {
  for (const auto& [doc_id, sentences] : docs_) {
    nlohmann::ordered_json j;
    j["doc_id"] = doc_id;
    j["features"] = sentences;
    out << j.dump() << '\n';
  }
}

void ExternalFeatures::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::input, fmt::format("cannot write feature file '{}'", path.string()));
  write(out);
}

}  // namespace msum

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/labeling.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "msum/error.hpp"

namespace msum {
namespace {

// Per-document token interning so repeated ROUGE evaluations compare ints.
struct InternedDocument {
  std::vector<std::vector<std::int32_t>> sentences;
  std::vector<std::int32_t> reference;
};

InternedDocument intern(const Document& doc) {
  std::unordered_map<std::string, std::int32_t> ids;
  auto id_of = [&](const std::string& t) {
    return ids.emplace(t, static_cast<std::int32_t>(ids.size())).first->second;
  };
  InternedDocument out;
  for (const auto& s : doc.sentences) {
    std::vector<std::int32_t> v;
    v.reserve(s.tokens.size());
    for (const auto& t : s.tokens) v.push_back(id_of(t));
    out.sentences.push_back(std::move(v));
  }
  for (const auto& s : doc.reference) {
    for (const auto& t : s.tokens) out.reference.push_back(id_of(t));
  }
  return out;
}

std::vector<std::int32_t> flatten(const InternedDocument& doc, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<std::int32_t> out;
  for (std::size_t i : indices) {
    out.insert(out.end(), doc.sentences[i].begin(), doc.sentences[i].end());
  }
  return out;
}

RougeTriple score_needed(std::span<const std::int32_t> cand, std::span<const std::int32_t> ref,
                         OracleMetric metric) {
  RougeTriple t;
  switch (metric) {
    case OracleMetric::rouge1: t.rouge1 = rouge_n(cand, ref, 1); break;
    case OracleMetric::rouge2: t.rouge2 = rouge_n(cand, ref, 2); break;
    case OracleMetric::rougeL: t.rougeL = rouge_l(cand, ref); break;
    case OracleMetric::rouge12:
      t.rouge1 = rouge_n(cand, ref, 1);
      t.rouge2 = rouge_n(cand, ref, 2);
      break;
    case OracleMetric::mean3: t = rouge_all(cand, ref); break;
  }
  return t;
}

}  // namespace

std::string_view to_string(OracleMetric metric) {
  switch (metric) {
    case OracleMetric::rouge1: return "rouge1";
    case OracleMetric::rouge2: return "rouge2";
    case OracleMetric::rougeL: return "rougeL";
    case OracleMetric::rouge12: return "rouge12";
    case OracleMetric::mean3: return "mean3";
  }
  return "rouge12";
}

std::optional<OracleMetric> parse_oracle_metric(std::string_view text) {
  for (auto m : {OracleMetric::rouge1, OracleMetric::rouge2, OracleMetric::rougeL,
                 OracleMetric::rouge12, OracleMetric::mean3}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

double oracle_objective(const RougeTriple& s, OracleMetric metric) {
  switch (metric) {
    case OracleMetric::rouge1: return s.rouge1.f1;
    case OracleMetric::rouge2: return s.rouge2.f1;
    case OracleMetric::rougeL: return s.rougeL.f1;
    case OracleMetric::rouge12: return (s.rouge1.f1 + s.rouge2.f1) / 2.0;
    case OracleMetric::mean3: return s.mean_f1();
  }
  return 0.0;
}

LabelVector greedy_oracle(const Document& doc, std::size_t max_select, OracleMetric metric) {
  if (doc.sentences.empty()) throw Error(ErrorKind::usage, "greedy_oracle: document has no sentences");
  if (max_select == 0) throw Error(ErrorKind::usage, "greedy_oracle: max_select must be >= 1");

  const InternedDocument interned = intern(doc);
  const std::size_t n = interned.sentences.size();
  LabelVector out;
  out.labels.assign(n, 0);
  std::vector<std::size_t> selected;
  double current = 0.0;

  while (selected.size() < std::min(max_select, n)) {
    double best_value = current;
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.labels[i] != 0) continue;
      auto trial = selected;
      trial.push_back(i);
      const auto cand = flatten(interned, std::move(trial));
      const double value = oracle_objective(score_needed(cand, interned.reference, metric), metric);
      if (value > best_value) {
        best_value = value;
        best = i;
      }
    }
    if (best == n) break;
    selected.push_back(best);
    out.labels[best] = 1;
    out.selection_order.push_back(best);
    out.cumulative.push_back(best_value);
    current = best_value;
  }
  return out;
}

LabelVector lead_k(std::size_t n_sentences, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::usage, "lead_k requires k >= 1");
  LabelVector out;
  out.labels.assign(n_sentences, 0);
  for (std::size_t i = 0; i < std::min(k, n_sentences); ++i) {
    out.labels[i] = 1;
    out.selection_order.push_back(i);
  }
  return out;
}

RougeTriple score_selection(const Document& doc, std::span<const std::size_t> indices) {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> cand;
  for (std::size_t i : sorted) {
    if (i >= doc.sentences.size()) throw Error(ErrorKind::usage, "score_selection: index out of range");
    const auto& t = doc.sentences[i].tokens;
    cand.insert(cand.end(), t.begin(), t.end());
  }
  const auto ref = doc.flat_reference();
  return rouge_all(cand, ref);
}

RougeTriple ext_oracle_eval(const Document& doc, std::size_t max_select, OracleMetric metric) {
  const LabelVector labels = greedy_oracle(doc, max_select, metric);
  return score_selection(doc, labels.selection_order);
}

}  // namespace msum

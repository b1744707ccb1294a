// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "msum/corpus.hpp"
#include "msum/metrics.hpp"

namespace msum {

/// Objective maximized by the greedy oracle.
enum class OracleMetric {
  rouge1,
  rouge2,
  rougeL,
  rouge12,  // mean of ROUGE-1 F1 and ROUGE-2 F1 (default)
  mean3,    // mean of ROUGE-1, ROUGE-2 and ROUGE-L F1
};

std::string_view to_string(OracleMetric metric);
std::optional<OracleMetric> parse_oracle_metric(std::string_view text);
double oracle_objective(const RougeTriple& scores, OracleMetric metric);

struct LabelVector {
  std::vector<int> labels;
  /// Sentence indices in the order they were picked.
  std::vector<std::size_t> selection_order;
  /// Objective value after each pick; strictly increasing.
  std::vector<double> cumulative;
};

inline constexpr std::size_t kDefaultOracleBudget = 3;

/// Greedy ROUGE oracle: repeatedly add the sentence with the largest strictly
/// positive objective gain (smaller index on ties) until `max_select` picks or
/// no gain remains. The selection is scored flattened in document order.
LabelVector greedy_oracle(const Document& doc, std::size_t max_select = kDefaultOracleBudget,
                          OracleMetric metric = OracleMetric::rouge12);

/// First min(k, n) sentences. Throws for k == 0.
LabelVector lead_k(std::size_t n_sentences, std::size_t k);

/// ROUGE of the given sentences (flattened in document order) against the
/// document's reference.
RougeTriple score_selection(const Document& doc, std::span<const std::size_t> indices);

RougeTriple ext_oracle_eval(const Document& doc, std::size_t max_select = kDefaultOracleBudget,
                            OracleMetric metric = OracleMetric::rouge12);

}  // namespace msum

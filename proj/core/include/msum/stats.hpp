// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msum/corpus.hpp"
#include "msum/labeling.hpp"
#include "msum/metrics.hpp"

namespace msum {

struct StatsOptions {
  std::size_t lead_k = 3;
  std::size_t oracle_budget = kDefaultOracleBudget;
  OracleMetric oracle_metric = OracleMetric::rouge12;
  std::size_t workers = 1;
};

/// Test-split measures of one domain, or of an average over domains.
struct StatsRow {
  std::string name;
  double n_train = 0;
  double n_valid = 0;
  double n_test = 0;
  /// Unset when the test split is empty.
  std::optional<double> coverage, density, compression;
  std::optional<RougeTriple> lead, oracle;
};

struct CorpusStats {
  /// Registry order.
  std::vector<StatsRow> domains;
  /// avg, avg_source and avg_heldout, each present only when at least one
  /// domain with test documents contributes.
  std::vector<StatsRow> averages;
};

CorpusStats corpus_stats(const Corpus& corpus, const StatsOptions& options = {});

inline constexpr const char* kStatsHeader =
    "domain,n_train,n_valid,n_test,coverage,density,compression,lead_r1,lead_r2,lead_rl,oracle_r1,"
    "oracle_r2,oracle_rl";

/// Counts as integers (2 decimals in average rows), measures with 2
/// decimals, ROUGE ×100; empty test splits print NA.
void write_stats_csv(std::ostream& out, const CorpusStats& stats);

}  // namespace msum

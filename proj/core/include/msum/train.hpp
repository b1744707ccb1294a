// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "msum/checkpoint.hpp"
#include "msum/corpus.hpp"
#include "msum/features.hpp"
#include "msum/strategies.hpp"

namespace msum {

struct EpochRecord {
  int epoch = 0;
  /// Mean training loss per source domain (as main domain), in source order.
  std::vector<double> train_loss;
  /// Validation BCE per source domain; NaN when the domain has no labeled
  /// validation documents.
  std::vector<double> valid_loss;
  /// Mean over source domains of validation ROUGE-1 F1.
  double valid_rouge1 = 0.0;
  bool improved = false;
};

struct TrainReport {
  Strategy strategy = Strategy::joint;
  std::vector<std::string> source_domains;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_valid_rouge1 = 0.0;
  bool early_stopped = false;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  std::string checkpoint_path;
};

struct TrainResult {
  TrainReport report;
  /// Parameters of the best validation epoch.
  Checkpoint checkpoint;
};

struct TrainOptions {
  /// Required by strategies built on external features.
  const ExternalFeatures* features = nullptr;
  /// Written when non-empty.
  std::filesystem::path checkpoint_path;
  std::size_t workers = 1;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Trains on the source domains of a labeled corpus. Identical inputs give
/// identical reports and checkpoints (wall time aside).
TrainResult train(const Corpus& corpus, const TrainConfig& config, const TrainOptions& options = {});

}  // namespace msum

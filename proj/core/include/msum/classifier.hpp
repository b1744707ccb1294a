// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msum/corpus.hpp"

namespace msum {

/// Mean of learned word embeddings over the whole document, followed by a
/// linear softmax layer over the source domains.
struct ClassifierConfig {
  int embed_dim = 32;
  int epochs = 5;
  int batch_size = 16;
  double learning_rate = 0.01;
  int min_frequency = 2;
  /// Tokens per document fed to the classifier.
  std::size_t max_tokens = 400;
  /// Shuffle training labels across documents (control run).
  bool permute_labels = false;
};

struct ClassifierReport {
  std::vector<std::string> domains;
  std::size_t train_documents = 0;
  std::size_t test_documents = 0;
  double accuracy = 0.0;
  /// 1 / number of source domains.
  double chance = 0.0;
  bool permuted = false;
};

/// Trains on source-domain train splits and reports accuracy on their test
/// splits. Needs at least two source domains.
ClassifierReport domain_classifier(const Corpus& corpus, std::uint64_t seed,
                                   const ClassifierConfig& config = {});

}  // namespace msum

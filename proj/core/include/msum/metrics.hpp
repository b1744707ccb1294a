// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace msum {

/// Precision/recall/F1 in [0, 1]. F1 is zero when P + R is zero.
struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_counts(std::size_t overlap, std::size_t candidate_total,
                                std::size_t reference_total);
};

struct RougeTriple {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;

  double mean_f1() const { return (rouge1.f1 + rouge2.f1 + rougeL.f1) / 3.0; }
};

/// Clipped n-gram overlap (multiset intersection). Either side shorter than
/// `n` yields zero scores. Throws for n < 1.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n);
RougeScore rouge_n(std::span<const std::int32_t> candidate,
                   std::span<const std::int32_t> reference, int n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);
std::size_t lcs_length(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

/// LCS-based ROUGE-L: R = LCS/|ref|, P = LCS/|cand|.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);
RougeScore rouge_l(std::span<const std::int32_t> candidate,
                   std::span<const std::int32_t> reference);

RougeTriple rouge_all(std::span<const std::string> candidate,
                      std::span<const std::string> reference);
RougeTriple rouge_all(std::span<const std::int32_t> candidate,
                      std::span<const std::int32_t> reference);

/// Mean of the ROUGE-1, ROUGE-2 and ROUGE-L F1 scores.
double rouge_mean(std::span<const std::string> candidate, std::span<const std::string> reference);

struct Fragment {
  std::size_t doc_start = 0;
  std::size_t summary_start = 0;
  std::size_t length = 0;

  bool operator==(const Fragment&) const = default;
};

struct FragmentStats {
  std::vector<Fragment> fragments;
  double coverage = 0.0;
  double density = 0.0;
  double compression = 0.0;
};

/// Greedy extractive fragments: scanning the summary left to right, take the
/// longest contiguous match found anywhere in the document (earliest document
/// start on ties) and jump past it; an unmatched token advances by one.
/// Throws when either side is empty.
FragmentStats extractive_fragments(std::span<const std::string> doc,
                                   std::span<const std::string> summary);

}  // namespace msum

// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "msum/error.hpp"

namespace msum {
namespace {

// Sorts n-gram start offsets lexicographically so that equal n-grams are
// adjacent; the clipped overlap is then a merge over the two sorted runs.
template <typename Tok>
std::vector<std::size_t> sorted_ngram_starts(std::span<const Tok> seq, std::size_t n) {
  std::vector<std::size_t> starts(seq.size() + 1 - n);
  std::iota(starts.begin(), starts.end(), std::size_t{0});
  std::sort(starts.begin(), starts.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(seq.begin() + a, seq.begin() + a + n, seq.begin() + b,
                                        seq.begin() + b + n);
  });
  return starts;
}

template <typename Tok>
int compare_ngrams(std::span<const Tok> a, std::size_t ia, std::span<const Tok> b, std::size_t ib,
                   std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (a[ia + k] < b[ib + k]) return -1;
    if (b[ib + k] < a[ia + k]) return 1;
  }
  return 0;
}

template <typename Tok>
RougeScore rouge_n_impl(std::span<const Tok> cand, std::span<const Tok> ref, int n_signed) {
  if (n_signed < 1) throw Error(ErrorKind::usage, "rouge_n requires n >= 1");
  const auto n = static_cast<std::size_t>(n_signed);
  if (cand.size() < n || ref.size() < n) return {};

  const auto cs = sorted_ngram_starts(cand, n);
  const auto rs = sorted_ngram_starts(ref, n);
  std::size_t overlap = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < cs.size() && j < rs.size()) {
    const int c = compare_ngrams(cand, cs[i], ref, rs[j], n);
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      ++overlap;
      ++i;
      ++j;
    }
  }
  return RougeScore::from_counts(overlap, cs.size(), rs.size());
}

template <typename Tok>
std::size_t lcs_impl(std::span<const Tok> a, std::span<const Tok> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename Tok>
RougeScore rouge_l_impl(std::span<const Tok> cand, std::span<const Tok> ref) {
  if (cand.empty() || ref.empty()) return {};
  return RougeScore::from_counts(lcs_impl(cand, ref), cand.size(), ref.size());
}

}  // namespace

RougeScore RougeScore::from_counts(std::size_t overlap, std::size_t candidate_total,
                                   std::size_t reference_total) {
  RougeScore s;
  if (candidate_total > 0) s.precision = static_cast<double>(overlap) / static_cast<double>(candidate_total);
  if (reference_total > 0) s.recall = static_cast<double>(overlap) / static_cast<double>(reference_total);
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n) {
  return rouge_n_impl(candidate, reference, n);
}

RougeScore rouge_n(std::span<const std::int32_t> candidate,
                   std::span<const std::int32_t> reference, int n) {
  return rouge_n_impl(candidate, reference, n);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  return lcs_impl(a, b);
}

std::size_t lcs_length(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  return lcs_impl(a, b);
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return rouge_l_impl(candidate, reference);
}

RougeScore rouge_l(std::span<const std::int32_t> candidate,
                   std::span<const std::int32_t> reference) {
  return rouge_l_impl(candidate, reference);
}

RougeTriple rouge_all(std::span<const std::string> candidate,
                      std::span<const std::string> reference) {
  return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2),
          rouge_l(candidate, reference)};
}

RougeTriple rouge_all(std::span<const std::int32_t> candidate,
                      std::span<const std::int32_t> reference) {
  return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2),
          rouge_l(candidate, reference)};
}

double rouge_mean(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return rouge_all(candidate, reference).mean_f1();
}

FragmentStats extractive_fragments(std::span<const std::string> doc,
                                   std::span<const std::string> summary) {
  if (summary.empty()) throw Error(ErrorKind::usage, "extractive_fragments: empty summary");
  if (doc.empty()) throw Error(ErrorKind::usage, "extractive_fragments: empty document");

  FragmentStats stats;
  std::size_t i = 0;
  while (i < summary.size()) {
    std::size_t best_len = 0;
    std::size_t best_start = 0;
    for (std::size_t j = 0; j < doc.size(); ++j) {
      if (doc[j] != summary[i]) continue;
      std::size_t k = 0;
      while (i + k < summary.size() && j + k < doc.size() && summary[i + k] == doc[j + k]) ++k;
      if (k > best_len) {
        best_len = k;
        best_start = j;
      }
    }
    if (best_len > 0) {
      stats.fragments.push_back({best_start, i, best_len});
      i += best_len;
    } else {
      ++i;
    }
  }

  const auto s = static_cast<double>(summary.size());
  double covered = 0.0;
  double squared = 0.0;
  for (const auto& f : stats.fragments) {
    covered += static_cast<double>(f.length);
    squared += static_cast<double>(f.length * f.length);
  }
  stats.coverage = covered / s;
  stats.density = squared / s;
  stats.compression = static_cast<double>(doc.size()) / s;
  return stats;
}

}  // namespace msum
